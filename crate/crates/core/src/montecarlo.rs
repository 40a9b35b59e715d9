//! Seeded Monte Carlo estimation of FD and HD rates.
//!
//! Trials are grouped in fixed chunks of `CHUNK` trials; chunk `i` draws
//! from ChaCha8 seeded with `seed` on stream `i`. Per-chunk accumulators are
//! merged in chunk order, so results do not depend on the thread count. All
//! schemes of one call see the same drops and fading (common random numbers).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::channel::{draw_realization, ChannelRealization};
use crate::error::{invalid, unsupported, Error, Result};
use crate::geometry::{sample_drop_fast, Drop, NetworkConfig};
use crate::linkmetrics::{evaluate, opt_coefficients, TrialOutcome};
use crate::precoding::{log2_1p, precoders, Scheme};
use crate::real::KahanSum;

pub const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
    /// SINR threshold of the outage fields.
    pub gamma_th: f64,
    /// t-grid size of the optimal design.
    pub grid_size: usize,
    pub parallel: bool,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { trials: 100_000, seed: 1, gamma_th: 1.0, grid_size: 200, parallel: true }
    }
}

impl McOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials, seed, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub scheme: String,
    pub mean_rate_ul: f64,
    pub mean_rate_dl: f64,
    pub mean_sum: f64,
    pub se_ul: f64,
    pub se_dl: f64,
    pub se_sum: f64,
    pub outage_ul: f64,
    pub outage_dl: f64,
    pub trials: u64,
    pub seed: u64,
    /// Trials whose disk held no DL user.
    pub empty_drops: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    s: KahanSum<f64>,
    s2: KahanSum<f64>,
}

impl Moments {
    fn add(&mut self, x: f64) {
        self.s.add(x);
        self.s2.add(x * x);
    }

    fn merge(&mut self, o: &Self) {
        self.s.merge(&o.s);
        self.s2.merge(&o.s2);
    }

    fn mean_se(&self, n: u64) -> (f64, f64) {
        let nf = n as f64;
        let m = self.s.value() / nf;
        if n < 2 {
            return (m, 0.0);
        }
        let var = ((self.s2.value() - nf * m * m) / (nf - 1.0)).max(0.0);
        (m, (var / nf).sqrt())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    n: u64,
    empty: u64,
    ul: Moments,
    dl: Moments,
    sum: Moments,
    out_ul: u64,
    out_dl: u64,
}

impl Acc {
    fn add(&mut self, ul: f64, dl: f64, sinr: Option<(f64, f64)>, gamma_th: f64) {
        self.n += 1;
        self.ul.add(ul);
        self.dl.add(dl);
        self.sum.add(ul + dl);
        if let Some((su, sd)) = sinr {
            self.out_ul += (su < gamma_th) as u64;
            self.out_dl += (sd < gamma_th) as u64;
        }
    }

    fn merge(&mut self, o: &Self) {
        self.n += o.n;
        self.empty += o.empty;
        self.ul.merge(&o.ul);
        self.dl.merge(&o.dl);
        self.sum.merge(&o.sum);
        self.out_ul += o.out_ul;
        self.out_dl += o.out_dl;
    }

    fn report(&self, scheme: String, seed: u64) -> RateReport {
        let (mean_rate_ul, se_ul) = self.ul.mean_se(self.n);
        let (mean_rate_dl, se_dl) = self.dl.mean_se(self.n);
        let (_, se_sum) = self.sum.mean_se(self.n);
        let n = self.n.max(1) as f64;
        RateReport {
            scheme,
            mean_rate_ul,
            mean_rate_dl,
            mean_sum: mean_rate_ul + mean_rate_dl,
            se_ul,
            se_dl,
            se_sum,
            outage_ul: self.out_ul as f64 / n,
            outage_dl: self.out_dl as f64 / n,
            trials: self.n,
            seed,
            empty_drops: self.empty,
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `trial` over `opts.trials` trials and returns the per-chunk states in
/// chunk order.
fn run_chunks<A, F>(opts: &McOptions, init: impl Fn() -> A + Sync, trial: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(&mut A, &mut ChaCha8Rng) -> Result<()> + Sync,
{
    if opts.trials == 0 {
        return Err(invalid("trials", "must be ≥ 1"));
    }
    let chunks = opts.trials.div_ceil(CHUNK);
    let work = |c: u64| -> Result<A> {
        let mut rng = chunk_rng(opts.seed, c);
        let mut a = init();
        let n = CHUNK.min(opts.trials - c * CHUNK);
        for _ in 0..n {
            trial(&mut a, &mut rng)?;
        }
        Ok(a)
    };
    if opts.parallel {
        (0..chunks).into_par_iter().map(work).collect()
    } else {
        (0..chunks).map(work).collect()
    }
}

fn check_schemes(cfg: &NetworkConfig<f64>, schemes: &[Scheme]) -> Result<()> {
    cfg.validate()?;
    if schemes.is_empty() {
        return Err(invalid("schemes", "must be nonempty"));
    }
    for s in schemes {
        s.check_antennas(cfg.n_u, cfg.n_d)?;
        if *s == Scheme::Optimal && !(cfg.sigma_n2 > 0.0) {
            return Err(unsupported("optimal", "needs sigma_n2 > 0"));
        }
    }
    Ok(())
}

/// One FD trial for every scheme on shared randomness.
pub fn fd_trial<R: Rng + ?Sized>(
    cfg: &NetworkConfig<f64>,
    schemes: &[Scheme],
    grid_size: usize,
    rng: &mut R,
) -> Result<(Drop<f64>, ChannelRealization<f64>, Vec<TrialOutcome<f64>>)> {
    let drop = sample_drop_fast(cfg, rng);
    let chan = draw_realization(cfg, rng);
    let mut out = Vec::with_capacity(schemes.len());
    for &s in schemes {
        let k = (s == Scheme::Optimal).then(|| opt_coefficients(&drop, &chan, cfg));
        let p = precoders(s, &chan.h_ad, &chan.h_ua, &chan.h_aa, k.as_ref().map(|k| (k, cfg.p_a, grid_size)))?;
        out.push(evaluate(&drop, &chan, &p.w_t, &p.w_r, cfg));
    }
    Ok((drop, chan, out))
}

fn finite_rates(o: &TrialOutcome<f64>) -> Result<()> {
    if o.rate_ul.is_finite() && o.rate_dl.is_finite() {
        Ok(())
    } else {
        Err(invalid("sigma_n2", "zero noise with an interference-free link gives an unbounded rate"))
    }
}

/// FD rates of several schemes under common random numbers.
pub fn estimate_fd_multi(cfg: &NetworkConfig<f64>, schemes: &[Scheme], opts: &McOptions) -> Result<Vec<RateReport>> {
    check_schemes(cfg, schemes)?;
    let chunks = run_chunks(
        opts,
        || vec![Acc::default(); schemes.len()],
        |acc, rng| {
            let (drop, _, out) = fd_trial(cfg, schemes, opts.grid_size, rng)?;
            for (a, o) in acc.iter_mut().zip(&out) {
                finite_rates(o)?;
                a.add(o.rate_ul, o.rate_dl, Some((o.sinr_ul, o.sinr_dl)), opts.gamma_th);
                a.empty += drop.is_empty() as u64;
            }
            Ok(())
        },
    )?;
    let mut total = vec![Acc::default(); schemes.len()];
    for c in &chunks {
        for (t, a) in total.iter_mut().zip(c) {
            t.merge(a);
        }
    }
    Ok(total.iter().zip(schemes).map(|(a, s)| a.report(s.label().into(), opts.seed)).collect())
}

pub fn estimate_fd(cfg: &NetworkConfig<f64>, scheme: Scheme, opts: &McOptions) -> Result<RateReport> {
    Ok(estimate_fd_multi(cfg, &[scheme], opts)?.remove(0))
}

/// Fractions of trials with SINR below `gamma_th`, as (UL, DL).
pub fn estimate_outage(cfg: &NetworkConfig<f64>, scheme: Scheme, gamma_th: f64, opts: &McOptions) -> Result<(f64, f64)> {
    if !(gamma_th > 0.0) {
        return Err(invalid("gamma_th", "must be > 0"));
    }
    let c = estimate_cdf(cfg, scheme, &[gamma_th], opts)?;
    Ok((c.ul[0], c.dl[0]))
}

/// Empirical SINR CDFs P(SINR ≤ z) on a z-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfEstimate {
    pub z: Vec<f64>,
    pub ul: Vec<f64>,
    pub dl: Vec<f64>,
    pub trials: u64,
}

impl CdfEstimate {
    /// Binomial standard error of a CDF value.
    pub fn se(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

pub fn estimate_cdf(cfg: &NetworkConfig<f64>, scheme: Scheme, z: &[f64], opts: &McOptions) -> Result<CdfEstimate> {
    check_schemes(cfg, &[scheme])?;
    let chunks = run_chunks(
        opts,
        || (vec![0u64; z.len()], vec![0u64; z.len()]),
        |(cu, cd), rng| {
            let (_, _, out) = fd_trial(cfg, &[scheme], opts.grid_size, rng)?;
            let o = out[0];
            for (i, zi) in z.iter().enumerate() {
                cu[i] += (o.sinr_ul <= *zi) as u64;
                cd[i] += (o.sinr_dl <= *zi) as u64;
            }
            Ok(())
        },
    )?;
    let mut ul = vec![0u64; z.len()];
    let mut dl = vec![0u64; z.len()];
    for (cu, cd) in &chunks {
        for i in 0..z.len() {
            ul[i] += cu[i];
            dl[i] += cd[i];
        }
    }
    let n = opts.trials as f64;
    Ok(CdfEstimate {
        z: z.to_vec(),
        ul: ul.iter().map(|c| *c as f64 / n).collect(),
        dl: dl.iter().map(|c| *c as f64 / n).collect(),
        trials: opts.trials,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HdCondition {
    /// Antenna-conserved: n_d + n_u antennas in each phase.
    Ac,
    /// RF-chain-conserved: n_d antennas on DL, n_u on UL.
    Rc,
}

impl HdCondition {
    pub fn label(self) -> &'static str {
        match self {
            HdCondition::Ac => "hd_ac",
            HdCondition::Rc => "hd_rc",
        }
    }

    pub fn antennas(self, cfg: &NetworkConfig<f64>) -> (usize, usize) {
        match self {
            HdCondition::Ac => (cfg.n_d + cfg.n_u, cfg.n_d + cfg.n_u),
            HdCondition::Rc => (cfg.n_d, cfg.n_u),
        }
    }
}

/// Per-phase HD rates (DL, UL) of one trial at full powers, before δ weighting.
fn hd_trial<R: Rng + ?Sized>(cfg: &NetworkConfig<f64>, n_dl: usize, n_ul: usize, rng: &mut R) -> (f64, f64, bool) {
    let drop = sample_drop_fast(cfg, rng);
    let g_dl: f64 = Gamma::new(n_dl as f64, 1.0).map(|g| g.sample(rng)).unwrap_or(0.0);
    let g_ul: f64 = Gamma::new(n_ul as f64, 1.0).map(|g| g.sample(rng)).unwrap_or(0.0);
    let dl = match drop.dl_point {
        Some(p) => {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            log2_1p(snr(cfg.p_a * r.powf(-cfg.alpha) * g_dl, cfg.sigma_n2))
        }
        None => 0.0,
    };
    let ul = log2_1p(snr(cfg.p_u * drop.ul_distance().powf(-cfg.alpha) * g_ul, cfg.sigma_n2));
    (dl, ul, drop.is_empty())
}

fn snr(num: f64, noise: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / noise
    }
}

/// HD baseline δ·E[R_dl] + (1−δ)·E[R_ul] with unscaled phase powers.
pub fn estimate_hd(cfg: &NetworkConfig<f64>, condition: HdCondition, delta: f64, opts: &McOptions) -> Result<RateReport> {
    cfg.validate()?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    if !(cfg.sigma_n2 > 0.0) {
        return Err(invalid("sigma_n2", "HD rates are unbounded without noise"));
    }
    let (n_dl, n_ul) = condition.antennas(cfg);
    let chunks = run_chunks(opts, Acc::default, |a, rng| {
        let (dl, ul, empty) = hd_trial(cfg, n_dl, n_ul, rng);
        a.add((1.0 - delta) * ul, delta * dl, None, 0.0);
        a.empty += empty as u64;
        Ok(())
    })?;
    let mut total = Acc::default();
    for c in &chunks {
        total.merge(c);
    }
    Ok(total.report(condition.label().into(), opts.seed))
}

/// Large-n_u MRC/MRT: DL with P_a/n_u, LI-free MRC UL.
pub fn estimate_large_array(cfg: &NetworkConfig<f64>, opts: &McOptions) -> Result<RateReport> {
    cfg.validate()?;
    if !(cfg.sigma_n2 > 0.0) {
        return Err(invalid("sigma_n2", "the LI-free UL rate is unbounded without noise"));
    }
    let scaled = NetworkConfig { p_a: cfg.p_a / cfg.n_u as f64, sigma_aa2: 0.0, ..cfg.clone() };
    let mut r = estimate_fd(&scaled, Scheme::MrcMrt, opts)?;
    r.scheme = "large_array".into();
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub delta: f64,
    pub fd_ul: f64,
    pub fd_dl: f64,
    pub hd_ul: f64,
    pub hd_dl: f64,
}

/// FD rates with powers δ·P_a and (1−δ)·P_u next to the HD frontier
/// (δ·R_dl, (1−δ)·R_ul), for each δ.
pub fn rate_region(
    cfg: &NetworkConfig<f64>,
    scheme: Scheme,
    condition: HdCondition,
    delta_grid: &[f64],
    opts: &McOptions,
) -> Result<Vec<RegionPoint>> {
    delta_grid
        .iter()
        .map(|&delta| {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(invalid("delta_grid", "values must lie in (0, 1)"));
            }
            let fd_cfg = NetworkConfig { p_a: delta * cfg.p_a, p_u: (1.0 - delta) * cfg.p_u, ..cfg.clone() };
            let fd = estimate_fd(&fd_cfg, scheme, opts)?;
            let hd = estimate_hd(cfg, condition, delta, opts)?;
            Ok(RegionPoint { delta, fd_ul: fd.mean_rate_ul, fd_dl: fd.mean_rate_dl, hd_ul: hd.mean_rate_ul, hd_dl: hd.mean_rate_dl })
        })
        .collect()
}

/// Operating mode whose δ is tuned for equal UL and DL rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FairMode {
    /// FD with powers δ·P_a and (1−δ)·P_u.
    Fd(Scheme),
    Hd(HdCondition),
}

/// Bisection on δ until |R_ul − R_dl| ≤ tol (or the bracket collapses).
/// Returns δ and the report at that δ. Every evaluation reuses the seed.
pub fn fair_delta(cfg: &NetworkConfig<f64>, mode: FairMode, tol: f64, opts: &McOptions) -> Result<(f64, RateReport)> {
    let eval = |delta: f64| -> Result<RateReport> {
        match mode {
            FairMode::Fd(s) => {
                let c = NetworkConfig { p_a: delta * cfg.p_a, p_u: (1.0 - delta) * cfg.p_u, ..cfg.clone() };
                estimate_fd(&c, s, opts)
            }
            FairMode::Hd(cond) => estimate_hd(cfg, cond, delta, opts),
        }
    };
    let (mut lo, mut hi) = (1e-3, 1.0 - 1e-3);
    let mut r = eval(0.5)?;
    let mut mid = 0.5;
    for _ in 0..60 {
        let gap = r.mean_rate_ul - r.mean_rate_dl;
        if gap.abs() <= tol || hi - lo < 1e-9 {
            break;
        }
        // UL share shrinks as δ grows
        if gap > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        r = eval(mid)?;
    }
    Ok((mid, r))
}

/// Gain (R_FD − R_HD)/R_FD.
pub fn gain(fd_sum: f64, hd_sum: f64) -> Result<f64> {
    if !(fd_sum > 0.0) {
        return Err(Error::Domain("gain needs a positive FD sum rate".into()));
    }
    Ok((fd_sum - hd_sum) / fd_sum)
}
