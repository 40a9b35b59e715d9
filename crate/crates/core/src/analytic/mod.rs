//! Analytic CDFs and average rates, for cross-validation against Monte Carlo.
//!
//! Quadrature variants integrate the conditional laws over the DL user
//! position (radius r, weight of the selection rule) and, for the UL user,
//! over the angle θ at the DL user, so that the UL distance is
//! L = √(r² + d² − 2rd·cos θ). They use the same conventions as the
//! simulator: an empty disk leaves the DL user without service (SINR 0) and
//! puts the UL anchor uniformly in the disk.
//!
//! Series variants follow the closed-form expansions under nearest-user
//! selection; they ignore the empty-disk anchor, which is e^(−λπR²)-small.
//! Variants tagged interference-limited drop σ²_n whatever the config holds.

mod series;

use std::cell::Cell;
use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, unsupported, Error, Result};
use crate::geometry::{NetworkConfig, Selection};
use crate::montecarlo::HdCondition;
use crate::quad::{QuadResult, Quadrature};
use crate::specfun::{
    exp_e1_scaled, exp_ei_scaled, exp_en_scaled, gamma_p, ln_gamma, parabolic_cyl_dm1_scaled, tricomi_u,
};

pub(crate) use series::adaptive_terms;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSpec {
    /// Relative tolerance of the outer quadrature.
    pub rel_tol: f64,
    /// Fixed series truncation; `None` picks it from λπR².
    pub terms: Option<usize>,
    pub max_terms: usize,
    /// A series is non-convergent when its last term exceeds this fraction
    /// of the partial sum.
    pub tail: f64,
    pub z_grid: Vec<f64>,
}

impl Default for EvalSpec {
    fn default() -> Self {
        let z_grid = (0..20).map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0)).collect();
        Self { rel_tol: 1e-8, terms: None, max_terms: 2000, tail: 1e-10, z_grid }
    }
}

impl EvalSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(invalid("rel_tol", "must lie in (0, 1)"));
        }
        if self.terms == Some(0) || self.max_terms == 0 {
            return Err(invalid("terms", "must be ≥ 1"));
        }
        if !(self.tail > 0.0) {
            return Err(invalid("tail", "must be > 0"));
        }
        if self.z_grid.iter().any(|z| !(*z >= 0.0 && z.is_finite())) {
            return Err(invalid("z_grid", "values must be finite and ≥ 0"));
        }
        Ok(())
    }

    /// Number of series terms used at the given λπR².
    pub fn series_terms(&self, a: f64) -> usize {
        self.terms.unwrap_or_else(|| adaptive_terms(a))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Fallbacks and ignored inputs.
    pub note: Option<String>,
}

impl Evaluation {
    fn plain(value: f64) -> Self {
        Self { value, note: None }
    }
}

macro_rules! variants {
    ($(#[$m:meta])* $name:ident { $($v:ident => $l:literal),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($v),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$v),*];

            pub fn label(self) -> &'static str {
                match self { $($name::$v => $l),* }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }

        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                let key = s.trim().to_ascii_lowercase().replace('-', "_");
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| v.label() == key)
                    .ok_or_else(|| unsupported(format!("variant `{s}`"), concat!("not a ", stringify!($name))))
            }
        }
    };
}

variants!(UlCdf {
    Case1Quadrature => "case1_quadrature",
    Case1Alpha2Series => "case1_alpha2_series",
    Case1Alpha4Lb => "case1_alpha4_lb",
    Case2Il => "case2_il",
    MrcZf => "mrczf",
    ZfMrt => "zfmrt",
    DualAlpha2 => "dual_alpha2",
});

variants!(UlRate {
    Case1Exact => "case1_exact",
    Case1Alpha2 => "case1_alpha2",
    Case1Alpha4Ub => "case1_alpha4_ub",
    Case2Il => "case2_il",
    MrcZf => "mrczf",
    ZfMrt => "zfmrt",
    DualUbAlpha2 => "dual_ub_alpha2",
});

variants!(DlCdf {
    Exact => "exact",
    IlIntegral => "il_integral",
    IlSeries => "il_series",
    Nd1Series => "nd1_series",
    Alpha2Tricomi => "alpha2_tricomi",
    Dual => "dual",
});

variants!(DlRate {
    Exact => "exact",
    Il => "il",
    IlMrcZf => "il_mrczf",
    Nd1 => "nd1",
    DualUb => "dual_ub",
    HdAc => "hd_ac",
    HdRc => "hd_rc",
});

// ---------------------------------------------------------------------------
// Shared integration machinery
// ---------------------------------------------------------------------------

fn lam_pi(cfg: &NetworkConfig<f64>) -> f64 {
    cfg.lambda_d * PI
}

/// Probability that the disk holds no DL user.
fn empty_prob(cfg: &NetworkConfig<f64>) -> f64 {
    (-lam_pi(cfg) * cfg.r_c * cfg.r_c).exp()
}

/// Density of the DL radius that the UL anchor sees, including the uniform
/// anchor of an empty disk. Integrates to one over [0, R].
fn ul_weight(cfg: &NetworkConfig<f64>, r: f64) -> f64 {
    let uniform = 2.0 * r / (cfg.r_c * cfg.r_c);
    match cfg.selection {
        Selection::Nus => 2.0 * lam_pi(cfg) * r * (-lam_pi(cfg) * r * r).exp() + empty_prob(cfg) * uniform,
        Selection::Rus => uniform,
    }
}

/// Density of the scheduled DL radius; integrates to 1 − e^(−λπR²).
fn dl_weight(cfg: &NetworkConfig<f64>, r: f64) -> f64 {
    match cfg.selection {
        Selection::Nus => 2.0 * lam_pi(cfg) * r * (-lam_pi(cfg) * r * r).exp(),
        Selection::Rus => (1.0 - empty_prob(cfg)) * 2.0 * r / (cfg.r_c * cfg.r_c),
    }
}

fn radial_breaks(cfg: &NetworkConfig<f64>) -> Vec<f64> {
    let mut pts = vec![0.0, cfg.r_c];
    if cfg.lambda_d > 0.0 {
        let s = 1.0 / lam_pi(cfg).sqrt();
        for m in [0.5, 1.0, 2.0, 4.0] {
            pts.push(m * s);
        }
    }
    pts.push(cfg.d);
    pts.retain(|&p| p >= 0.0 && p <= cfg.r_c);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

struct Ctx<'a> {
    cfg: &'a NetworkConfig<f64>,
    outer: Quadrature<f64>,
    inner: Quadrature<f64>,
    failed: Cell<bool>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a NetworkConfig<f64>, spec: &EvalSpec) -> Self {
        Self {
            cfg,
            outer: Quadrature::new(spec.rel_tol).with_abs_tol(1e-15),
            inner: Quadrature::new(spec.rel_tol * 1e-2).with_abs_tol(1e-17).with_max_panels(1000),
            failed: Cell::new(false),
        }
    }

    fn note(&self, r: QuadResult<f64>) -> f64 {
        if !r.converged {
            self.failed.set(true);
        }
        r.value
    }

    fn finish(&self, r: QuadResult<f64>, what: &str) -> Result<f64> {
        if !r.converged || self.failed.get() {
            return Err(Error::NonConvergence(format!("{what}: quadrature, partial value {}", r.value)));
        }
        if !r.value.is_finite() {
            return Err(Error::Domain(format!("{what}: non-finite value")));
        }
        Ok(r.value)
    }

    /// ∫ w_ul(r)·(1/π)∫₀^π f(L^α) dθ dr.
    fn ul_polar(&self, what: &str, f: impl Fn(f64) -> f64) -> Result<f64> {
        let cfg = self.cfg;
        let (d, alpha) = (cfg.d, cfg.alpha);
        let theta_avg = |r: f64| -> f64 {
            if d == 0.0 || r == 0.0 {
                return f((r + d).powf(alpha));
            }
            // θ = πs² clusters nodes where L can vanish
            let g = |s: f64| {
                let th = PI * s * s;
                let l2 = (r - d).powi(2) + 2.0 * r * d * (1.0 - th.cos());
                2.0 * s * f(l2.max(1e-300).powf(0.5 * alpha))
            };
            self.note(self.inner.integrate(g, 0.0, 1.0))
        };
        let mut h = |r: f64| {
            let w = ul_weight(cfg, r);
            if w == 0.0 {
                0.0
            } else {
                w * theta_avg(r)
            }
        };
        let r = self.outer.integrate_breaks(&mut h, &radial_breaks(cfg));
        self.finish(r, what)
    }

    /// ∫ w_dl(r)·f(r) dr.
    fn dl_radial(&self, what: &str, f: impl Fn(f64) -> f64) -> Result<f64> {
        let cfg = self.cfg;
        let mut h = |r: f64| {
            let w = dl_weight(cfg, r);
            if w == 0.0 {
                0.0
            } else {
                w * f(r)
            }
        };
        let r = self.outer.integrate_breaks(&mut h, &radial_breaks(cfg));
        self.finish(r, what)
    }
}

/// ∫₀^∞ ccdf(y)/(1+y) dy in nats, through y = eˢ; `knee` is a scale near
/// which the ccdf starts to fall.
fn log_integral(q: &Quadrature<f64>, ccdf: impl Fn(f64) -> f64, knee: f64) -> QuadResult<f64> {
    let k = if knee > 0.0 && knee.is_finite() { knee.ln().clamp(-600.0, 600.0) } else { 0.0 };
    let lo = (-40.0f64).min(k - 40.0);
    let hi = k.max(0.0) + 60.0;
    let mut pts = vec![lo, 0.0, k, hi];
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let mut g = |s: f64| {
        let c = ccdf(s.exp());
        if c == 0.0 {
            0.0
        } else {
            // logistic weight eˢ/(1+eˢ)
            c / (1.0 + (-s).exp())
        }
    };
    q.integrate_breaks(&mut g, &pts)
}

/// Rate (bits) of a CDF given as a function: ∫₀^∞ (1 − F(2ᵗ − 1)) dt.
pub fn rate_from_cdf(cdf: impl Fn(f64) -> Result<f64>, knee: f64, rel_tol: f64) -> Result<f64> {
    let err = std::cell::RefCell::new(None);
    let q = Quadrature::new(rel_tol).with_abs_tol(1e-14);
    let r = log_integral(
        &q,
        |y| match cdf(y) {
            Ok(f) => 1.0 - f,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        knee,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    if !r.converged {
        return Err(Error::NonConvergence(format!("rate integral, partial value {}", r.value / LN_2)));
    }
    Ok(r.value / LN_2)
}

/// E[ln(1 + ρG)] for G ~ Gamma(n, 1), which is Σₖ e^μ·Eₖ(μ), k = 1..n,
/// μ = 1/ρ.
fn gamma_log_rate(n: usize, rho: f64) -> Option<f64> {
    if rho == 0.0 {
        return Some(0.0);
    }
    if !rho.is_finite() {
        return None;
    }
    let mu = 1.0 / rho;
    if mu <= 1.0 {
        // Tₖ = (1 − μ·Tₖ₋₁)/k, T₀ = e^μ·E₁(μ)
        let mut t = exp_e1_scaled(mu).ok()?.value;
        let mut s = t;
        for k in 1..n {
            t = (1.0 - mu * t) / k as f64;
            s += t;
        }
        return Some(s);
    }
    let mut s = 0.0;
    for k in 1..=n {
        let r = exp_en_scaled(k, mu).ok()?;
        if !r.converged {
            return None;
        }
        s += r.value;
    }
    Some(s)
}

/// ∫₀^∞ [1 − (y/(y+s))ⁿ]/(1+y) dy = s·∫₀¹ (1 + u + … + uⁿ⁻¹)/(1 + (s−1)u) du.
fn il_log_rate(n: usize, s: f64, q: &Quadrature<f64>) -> Option<f64> {
    if s == 0.0 {
        return Some(0.0);
    }
    if !s.is_finite() {
        return None;
    }
    if n == 1 {
        let e = s - 1.0;
        return Some(if e.abs() < 1e-8 { 1.0 - 0.5 * e } else { s * s.ln() / e });
    }
    let f = |u: f64| {
        let mut p = 1.0;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += p;
            p *= u;
        }
        s * acc / (1.0 + (s - 1.0) * u)
    };
    let mut pts = vec![0.0, 1.0];
    if s > 1.0 {
        let mut x = 1.0 / s;
        while x < 0.5 {
            pts.push(x);
            x *= 16.0;
        }
        pts.sort_by(|a, b| a.total_cmp(b));
    }
    let mut f = f;
    let r = q.integrate_breaks(&mut f, &pts);
    r.converged.then_some(r.value)
}

// ---------------------------------------------------------------------------
// Preconditions
// ---------------------------------------------------------------------------

fn check_z(z: f64) -> Result<()> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(invalid("z", "must be finite and ≥ 0"));
    }
    Ok(())
}

fn need(ok: bool, what: impl fmt::Display, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(unsupported(what.to_string(), reason))
    }
}

fn need_nus(cfg: &NetworkConfig<f64>, what: impl fmt::Display) -> Result<()> {
    need(cfg.selection == Selection::Nus, what, "series form assumes nearest-user selection")
}

/// p with α = 2p, when α is an even integer.
fn half_alpha(cfg: &NetworkConfig<f64>) -> Option<usize> {
    let p = cfg.alpha / 2.0;
    (p == p.round() && p >= 1.0 && p <= 64.0).then_some(p as usize)
}

fn il_note(cfg: &NetworkConfig<f64>) -> Option<String> {
    (cfg.sigma_n2 != 0.0).then(|| "interference-limited: sigma_n2 ignored".to_string())
}

fn with_note(value: f64, note: Option<String>) -> Evaluation {
    Evaluation { value, note }
}

// ---------------------------------------------------------------------------
// UL
// ---------------------------------------------------------------------------

fn ul_requirements(cfg: &NetworkConfig<f64>, what: impl fmt::Display + Copy, case1: bool, case2: bool) -> Result<()> {
    if case1 {
        need(cfg.n_u == 1, what, "Case-1 needs n_u = 1")?;
    }
    if case2 {
        need(cfg.n_d == 1, what, "Case-2 needs n_d = 1")?;
    }
    Ok(())
}

/// UL CDF F(z) = P(SINR_a ≤ z).
pub fn ul_cdf(cfg: &NetworkConfig<f64>, z: f64, variant: UlCdf, spec: &EvalSpec) -> Result<Evaluation> {
    cfg.validate()?;
    spec.validate()?;
    check_z(z)?;
    use UlCdf::*;
    match variant {
        Case1Quadrature | Case1Alpha2Series | Case1Alpha4Lb => ul_requirements(cfg, variant, true, false)?,
        Case2Il => ul_requirements(cfg, variant, false, true)?,
        ZfMrt => need(cfg.n_u >= 2, variant, "ZF receive needs n_u ≥ 2")?,
        DualAlpha2 => {
            need(cfg.n_u == 1 && cfg.n_d == 1, variant, "dual-antenna AP needs n_u = n_d = 1")?;
            need(cfg.alpha == 2.0, variant, "needs α = 2")?;
        }
        MrcZf => {}
    }
    if z == 0.0 {
        return Ok(Evaluation::plain(0.0));
    }
    if cfg.p_u == 0.0 {
        return Ok(Evaluation::plain(1.0));
    }
    let ctx = Ctx::new(cfg, spec);
    let what = format!("ul_cdf {variant}");
    match variant {
        Case1Quadrature => {
            let (s2, pu) = (cfg.sigma_n2, cfg.p_u);
            let li = cfg.p_a * cfg.sigma_aa2;
            let v = ctx.ul_polar(&what, |la| {
                let x = z * s2 * la / pu;
                let y = z * li * la / pu;
                (y - (-x).exp_m1()) / (1.0 + y)
            })?;
            Ok(Evaluation::plain(v))
        }
        Case1Alpha2Series => {
            need(cfg.alpha == 2.0, variant, "needs α = 2")?;
            need_nus(cfg, variant)?;
            let kappa = z * cfg.p_a * cfg.sigma_aa2 / cfg.p_u;
            if kappa == 0.0 {
                return Ok(with_note(0.0, il_note(cfg)));
            }
            match series::case1_alpha2(cfg.lambda_d, cfg.r_c, cfg.d, kappa, spec) {
                Ok(v) => Ok(with_note(v, il_note(cfg))),
                Err(e @ Error::NonConvergence(_)) if spec.terms.is_some() => Err(e),
                Err(e) => {
                    let il = NetworkConfig { sigma_n2: 0.0, ..cfg.clone() };
                    let v = ul_cdf(&il, z, Case1Quadrature, spec)?.value;
                    Ok(with_note(v, Some(format!("fell back to case1_quadrature: {e}"))))
                }
            }
        }
        Case1Alpha4Lb => {
            need(cfg.alpha == 4.0, variant, "needs α = 4")?;
            need_nus(cfg, variant)?;
            let a = lam_pi(cfg) * cfg.r_c * cfg.r_c;
            let x = z * cfg.sigma_aa2 * cfg.p_a / cfg.p_u * cfg.r_c.powi(4);
            let v = series::lerch_cdf(a, 2, x, spec, "UL α=4 series")?;
            Ok(with_note(v, il_note(cfg)))
        }
        Case2Il => {
            let n = cfg.n_u as i32;
            let li = cfg.p_a * cfg.sigma_aa2;
            if li == 0.0 {
                return Ok(with_note(0.0, il_note(cfg)));
            }
            let pu = cfg.p_u;
            let v = ctx.ul_polar(&what, |la| {
                let s = pu / (li * la);
                (z / (z + s)).powi(n)
            })?;
            Ok(with_note(v, il_note(cfg)))
        }
        MrcZf | ZfMrt => {
            let n = if variant == MrcZf { cfg.n_u } else { cfg.n_u - 1 } as f64;
            if cfg.sigma_n2 == 0.0 {
                return Ok(Evaluation::plain(0.0));
            }
            let (s2, pu) = (cfg.sigma_n2, cfg.p_u);
            let v = ctx.ul_polar(&what, |la| gamma_p(n, z * s2 * la / pu).map(|r| r.value).unwrap_or(f64::NAN))?;
            Ok(Evaluation::plain(v))
        }
        DualAlpha2 => {
            if cfg.sigma_n2 == 0.0 {
                return Ok(Evaluation::plain(0.0));
            }
            let psi = cfg.p_u / cfg.sigma_n2 * lam_pi(cfg);
            let a = lam_pi(cfg) * cfg.d * cfg.d;
            let ccdf = (-a / (1.0 + psi / z)).exp() / (1.0 + z / psi);
            Ok(Evaluation::plain(1.0 - ccdf))
        }
    }
}

/// Conditional Case-1 rate in nats given A = σ²_n·L^α/P_u and
/// B = P_a·σ²_aa·L^α/P_u: (e^A·E₁(A) − e^(A/B)·E₁(A/B))/(1 − B).
fn case1_conditional(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        if b == 0.0 {
            return f64::INFINITY;
        }
        let e = b - 1.0;
        return if e.abs() < 1e-8 { 1.0 - 0.5 * e } else { b.ln() / e };
    }
    let ea = exp_e1_scaled(a).map(|r| r.value).unwrap_or(f64::NAN);
    if b == 0.0 {
        return ea;
    }
    if (1.0 - b).abs() < 1e-6 {
        return 1.0 - a * ea;
    }
    let eb = exp_e1_scaled(a / b).map(|r| r.value).unwrap_or(f64::NAN);
    (ea - eb) / (1.0 - b)
}

/// Spatial average UL rate (bits/s/Hz).
pub fn ul_rate(cfg: &NetworkConfig<f64>, variant: UlRate, spec: &EvalSpec) -> Result<Evaluation> {
    cfg.validate()?;
    spec.validate()?;
    use UlRate::*;
    match variant {
        Case1Exact | Case1Alpha2 | Case1Alpha4Ub => ul_requirements(cfg, variant, true, false)?,
        Case2Il => ul_requirements(cfg, variant, false, true)?,
        ZfMrt => need(cfg.n_u >= 2, variant, "ZF receive needs n_u ≥ 2")?,
        DualUbAlpha2 => {
            need(cfg.n_u == 1 && cfg.n_d == 1, variant, "dual-antenna AP needs n_u = n_d = 1")?;
            need(cfg.alpha == 2.0, variant, "needs α = 2")?;
        }
        MrcZf => {}
    }
    if cfg.p_u == 0.0 {
        return Ok(Evaluation::plain(0.0));
    }
    let ctx = Ctx::new(cfg, spec);
    let what = format!("ul_rate {variant}");
    let unbounded = || Error::Domain(format!("{what}: rate is unbounded without noise or LI"));
    // reference SINR scale for the rate integrals over the CDF
    let typical_l = cfg.d.max(1.0 / lam_pi(cfg).max(1e-12).sqrt()).min(cfg.r_c);
    match variant {
        Case1Exact => {
            let (s2, pu) = (cfg.sigma_n2, cfg.p_u);
            let li = cfg.p_a * cfg.sigma_aa2;
            if s2 == 0.0 && li == 0.0 {
                return Err(unbounded());
            }
            let v = ctx.ul_polar(&what, |la| case1_conditional(s2 * la / pu, li * la / pu))?;
            Ok(Evaluation::plain(v / LN_2))
        }
        Case1Alpha2 | Case1Alpha4Ub => {
            let cdf_variant = if variant == Case1Alpha2 { UlCdf::Case1Alpha2Series } else { UlCdf::Case1Alpha4Lb };
            if cfg.sigma_aa2 * cfg.p_a == 0.0 {
                return Err(unbounded());
            }
            let notes = std::cell::RefCell::new(None);
            let knee = cfg.p_u / (cfg.p_a * cfg.sigma_aa2 * typical_l.powf(cfg.alpha));
            let v = rate_from_cdf(
                |y| {
                    let e = ul_cdf(cfg, y, cdf_variant, spec)?;
                    if e.note.is_some() {
                        notes.borrow_mut().get_or_insert(e.note.clone().unwrap_or_default());
                    }
                    Ok(e.value)
                },
                knee,
                spec.rel_tol,
            )?;
            Ok(with_note(v, notes.into_inner()))
        }
        Case2Il => {
            let n = cfg.n_u;
            let li = cfg.p_a * cfg.sigma_aa2;
            if li == 0.0 {
                return Err(unbounded());
            }
            let pu = cfg.p_u;
            let q = ctx.inner.clone();
            let v = ctx.ul_polar(&what, |la| {
                let s = pu / (li * la);
                il_log_rate(n, s, &q).unwrap_or(f64::NAN)
            })?;
            Ok(with_note(v / LN_2, il_note(cfg)))
        }
        MrcZf | ZfMrt => {
            let n = if variant == MrcZf { cfg.n_u } else { cfg.n_u - 1 };
            if cfg.sigma_n2 == 0.0 {
                return Err(unbounded());
            }
            let (s2, pu) = (cfg.sigma_n2, cfg.p_u);
            let v = ctx.ul_polar(&what, |la| gamma_log_rate(n, pu / (s2 * la)).unwrap_or(f64::NAN))?;
            Ok(Evaluation::plain(v / LN_2))
        }
        DualUbAlpha2 => {
            if cfg.sigma_n2 == 0.0 {
                return Err(unbounded());
            }
            let psi = cfg.p_u / cfg.sigma_n2 * lam_pi(cfg);
            let a = lam_pi(cfg) * cfg.d * cfg.d;
            Ok(Evaluation::plain(dual_ul_nats(psi, a, &ctx.inner)? / LN_2))
        }
    }
}

/// ψ·∫₀¹ e^(−au)/(1 + (ψ−1)u) du, in closed form away from ψ = 1.
fn dual_ul_nats(psi: f64, a: f64, q: &Quadrature<f64>) -> Result<f64> {
    if a == 0.0 {
        let e = psi - 1.0;
        return Ok(if e.abs() < 1e-8 { 1.0 - 0.5 * e } else { psi * psi.ln() / e });
    }
    if (psi - 1.0).abs() < 0.05 {
        let r = q.integrate(|u| (-a * u).exp() / (1.0 + (psi - 1.0) * u), 0.0, 1.0);
        return Ok(psi * r.value);
    }
    if psi > 1.0 {
        let beta = a / (psi - 1.0);
        let e1 = exp_e1_scaled(beta)?.value;
        let e2 = exp_e1_scaled(beta * psi)?.value;
        Ok(psi / (psi - 1.0) * (e1 - (-a).exp() * e2))
    } else {
        let c = a / (1.0 - psi);
        let ei1 = exp_ei_scaled(c)?.value;
        let tail = if psi > 0.0 { (-a).exp() * exp_ei_scaled(c * psi)?.value } else { 0.0 };
        Ok(psi / (1.0 - psi) * (ei1 - tail))
    }
}

// ---------------------------------------------------------------------------
// DL
// ---------------------------------------------------------------------------

/// P(SINR_d > z | r) with a Gamma(n) gain and unit-mean exponential
/// internode fading: e^(−c₀)·Σⱼ pʲq·Σₘ c₀ᵐ/m!, j < n, m < n − j, with
/// c₀ = z·r^α·σ²_n/P_a, c₁ = z·r^α·P_u·d^(−α)/P_a, p = c₁/(1+c₁), q = 1/(1+c₁).
fn dl_ccdf(n: usize, c0: f64, c1: f64) -> f64 {
    let (p, q) = if c1.is_infinite() { (1.0, 0.0) } else { (c1 / (1.0 + c1), 1.0 / (1.0 + c1)) };
    // prefix sums of the Poisson(c₀) weights, formed in logs so large c₀
    // neither overflows c₀ᵐ nor underflows e^(−c₀)
    let lc = c0.ln();
    let mut pref = Vec::with_capacity(n);
    let mut s = 0.0;
    for m in 0..n {
        s += if c0 == 0.0 {
            if m == 0 { 1.0 } else { 0.0 }
        } else {
            (m as f64 * lc - c0 - ln_gamma(m as f64 + 1.0)).exp()
        };
        pref.push(s);
    }
    let mut acc = 0.0;
    let mut pj = q;
    for j in 0..n {
        acc += pj * pref[n - 1 - j];
        pj *= p;
    }
    acc
}

fn dl_requirements(n: usize, what: impl fmt::Display) -> Result<()> {
    need(n >= 1, what, "needs at least one effective DL antenna")
}

/// DL CDF F(z) = P(SINR_d ≤ z), including the empty-disk atom.
pub fn dl_cdf(cfg: &NetworkConfig<f64>, z: f64, variant: DlCdf, spec: &EvalSpec) -> Result<Evaluation> {
    cfg.validate()?;
    spec.validate()?;
    check_z(z)?;
    use DlCdf::*;
    let n = cfg.n_d;
    dl_requirements(n, variant)?;
    let atom = empty_prob(cfg);
    let ctx = Ctx::new(cfg, spec);
    let what = format!("dl_cdf {variant}");
    let alpha = cfg.alpha;
    let dpow = cfg.d.powf(-alpha);
    match variant {
        Exact | IlIntegral => {
            if z == 0.0 {
                return Ok(Evaluation::plain(atom));
            }
            let s2 = if variant == Exact { cfg.sigma_n2 } else { 0.0 };
            let (pa, pu) = (cfg.p_a, cfg.p_u);
            let v = ctx.dl_radial(&what, |r| {
                let ra = r.powf(alpha);
                let c0 = z * ra * s2 / pa;
                let c1 = if pu == 0.0 { 0.0 } else { z * ra * pu * dpow / pa };
                if variant == IlIntegral {
                    if c1 == 0.0 {
                        0.0
                    } else if c1.is_infinite() {
                        1.0
                    } else {
                        (c1 / (1.0 + c1)).powi(n as i32)
                    }
                } else {
                    1.0 - dl_ccdf(n, c0, c1)
                }
            })?;
            let note = if variant == IlIntegral { il_note(cfg) } else { None };
            Ok(with_note(atom + v, note))
        }
        IlSeries | Nd1Series => {
            if variant == Nd1Series {
                need(n == 1, variant, "needs n_d = 1")?;
            }
            need_nus(cfg, variant)?;
            let p = half_alpha(cfg).ok_or_else(|| unsupported(variant.to_string(), "series needs α = 2p, p integer"))?;
            if z == 0.0 {
                return Ok(with_note(atom, il_note(cfg)));
            }
            let a = lam_pi(cfg) * cfg.r_c * cfg.r_c;
            // X = z·(P_u/P_a)·(R/d)^α, ε = 1/X
            let x = if cfg.p_u == 0.0 { 0.0 } else { z * cfg.p_u / cfg.p_a * (cfg.r_c / cfg.d).powf(alpha) };
            let v = if variant == Nd1Series {
                series::lerch_cdf(a, p, x, spec, "DL n_d=1 series")?
            } else {
                series::dl_moment_cdf(a, p, n, 1.0 / x, spec)?
            };
            Ok(with_note(v, il_note(cfg)))
        }
        Alpha2Tricomi => {
            need(alpha == 2.0, variant, "needs α = 2")?;
            need_nus(cfg, variant)?;
            if z == 0.0 || cfg.p_u == 0.0 {
                return Ok(with_note(0.0, il_note(cfg)));
            }
            let x = lam_pi(cfg) * cfg.p_a * cfg.d * cfg.d / (cfg.p_u * z);
            if x == 0.0 {
                return Ok(with_note(1.0, il_note(cfg)));
            }
            let nf = n as f64;
            let u = tricomi_u(nf, 0.0, x)?.get("Tricomi U")?;
            let g = crate::specfun::gamma(nf + 1.0);
            let note = Some("unbounded plane: empty-disk atom and R_c ignored".to_string());
            Ok(with_note((g * u).min(1.0), il_note(cfg).or(note)))
        }
        Dual => {
            need(n == 1, variant, "dual-antenna AP needs n_d = 1")?;
            if z == 0.0 || cfg.sigma_n2 == 0.0 {
                return Ok(Evaluation::plain(0.0));
            }
            let lp = lam_pi(cfg);
            let psi = cfg.p_a / cfg.sigma_n2 * lp * lp;
            let v = if alpha == 2.0 {
                1.0 - 1.0 / (1.0 + z * lp / psi)
            } else if alpha == 4.0 {
                1.0 - dual_alpha4_ccdf(psi, z)?
            } else {
                return Err(unsupported(variant.to_string(), "needs α ∈ {2, 4}"));
            };
            Ok(Evaluation::plain(v))
        }
    }
}

/// w·e^(w²/4)·D₋₁(w) with w = √(ψ_d/(2z)).
fn dual_alpha4_ccdf(psi: f64, z: f64) -> Result<f64> {
    let w = (psi / (2.0 * z)).sqrt();
    Ok(w * parabolic_cyl_dm1_scaled(w)?.value)
}

/// Spatial average DL rate (bits/s/Hz). `HdAc`/`HdRc` give the DL phase
/// rate of the HD baseline at full power, before the δ weight.
pub fn dl_rate(cfg: &NetworkConfig<f64>, variant: DlRate, spec: &EvalSpec) -> Result<Evaluation> {
    cfg.validate()?;
    spec.validate()?;
    use DlRate::*;
    let n = match variant {
        IlMrcZf => cfg.n_d.saturating_sub(1),
        HdAc => HdCondition::Ac.antennas(cfg).0,
        HdRc => HdCondition::Rc.antennas(cfg).0,
        _ => cfg.n_d,
    };
    dl_requirements(n, variant)?;
    let ctx = Ctx::new(cfg, spec);
    let what = format!("dl_rate {variant}");
    let alpha = cfg.alpha;
    let (pa, pu, s2) = (cfg.p_a, cfg.p_u, cfg.sigma_n2);
    let dpow = cfg.d.powf(-alpha);
    let unbounded = || Error::Domain(format!("{what}: rate is unbounded without noise or interference"));
    let q = ctx.inner.clone();
    match variant {
        Exact => {
            if s2 == 0.0 && (pu == 0.0 || cfg.d.is_infinite()) {
                return Err(unbounded());
            }
            let v = ctx.dl_radial(&what, |r| {
                let ra = r.powf(alpha);
                let a0 = ra * s2 / pa;
                let a1 = if pu == 0.0 { 0.0 } else { ra * pu * dpow / pa };
                if a1.is_infinite() {
                    return 0.0;
                }
                let res = log_integral(&q, |y| dl_ccdf(n, y * a0, y * a1), n as f64 / (a0 + a1));
                if !res.converged {
                    ctx.failed.set(true);
                }
                res.value
            })?;
            Ok(Evaluation::plain(v / LN_2))
        }
        Il | IlMrcZf => {
            if pu == 0.0 {
                return Err(unbounded());
            }
            let v = ctx.dl_radial(&what, |r| {
                let s = pa * cfg.d.powf(alpha) / (pu * r.powf(alpha));
                il_log_rate(n, s, &q).unwrap_or(f64::NAN)
            })?;
            Ok(with_note(v / LN_2, il_note(cfg)))
        }
        Nd1 => {
            need(n == 1, variant, "needs n_d = 1")?;
            if pu == 0.0 {
                return Err(unbounded());
            }
            let typical = (1.0 / lam_pi(cfg).max(1e-12).sqrt()).min(cfg.r_c);
            let knee = pa * cfg.d.powf(alpha) / (pu * typical.powf(alpha));
            let v = rate_from_cdf(|y| dl_cdf(cfg, y, DlCdf::Nd1Series, spec).map(|e| e.value), knee, spec.rel_tol)?;
            Ok(with_note(v, il_note(cfg)))
        }
        DualUb => {
            need(n == 1, variant, "dual-antenna AP needs n_d = 1")?;
            if s2 == 0.0 {
                return Err(unbounded());
            }
            let lp = lam_pi(cfg);
            let psi = pa / s2 * lp * lp;
            if alpha == 2.0 {
                let k = lp / psi;
                let e = k - 1.0;
                let v = if e.abs() < 1e-8 { 1.0 - 0.5 * e } else { k.ln() / e };
                Ok(Evaluation::plain(v / LN_2))
            } else if alpha == 4.0 {
                let r = log_integral(&q, |y| dual_alpha4_ccdf(psi, y).unwrap_or(f64::NAN), psi);
                if !r.converged {
                    return Err(Error::NonConvergence(format!("{what}: partial value {}", r.value / LN_2)));
                }
                Ok(Evaluation::plain(r.value / LN_2))
            } else {
                Err(unsupported(variant.to_string(), "needs α ∈ {2, 4}"))
            }
        }
        HdAc | HdRc => {
            if s2 == 0.0 {
                return Err(unbounded());
            }
            let v = ctx.dl_radial(&what, |r| gamma_log_rate(n, pa * r.powf(-alpha) / s2).unwrap_or(f64::NAN))?;
            Ok(Evaluation::plain(v / LN_2))
        }
    }
}

/// HD baseline (δ-weighted UL, δ-weighted DL): δ·E[R_dl] and (1−δ)·E[R_ul]
/// with unscaled powers.
pub fn hd_rates(cfg: &NetworkConfig<f64>, condition: HdCondition, spec: &EvalSpec) -> Result<(f64, f64)> {
    let delta = cfg.delta;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    let (_, n_ul) = condition.antennas(cfg);
    let dl = dl_rate(cfg, if condition == HdCondition::Ac { DlRate::HdAc } else { DlRate::HdRc }, spec)?.value;
    let ul_cfg = NetworkConfig { n_u: n_ul, ..cfg.clone() };
    let ul = ul_rate(&ul_cfg, UlRate::MrcZf, spec)?.value;
    Ok(((1.0 - delta) * ul, delta * dl))
}

/// Large-n_u MRC/MRT: (UL rate without LI, DL rate at P_a/n_u).
pub fn large_array_rates(cfg: &NetworkConfig<f64>, spec: &EvalSpec) -> Result<(f64, f64)> {
    let ul = ul_rate(cfg, UlRate::MrcZf, spec)?.value;
    let scaled = NetworkConfig { p_a: cfg.p_a / cfg.n_u as f64, ..cfg.clone() };
    let dl = dl_rate(&scaled, DlRate::Exact, spec)?.value;
    Ok((ul, dl))
}
