//! Transmit/receive beamformers at the AP.
//!
//! `w_t` is a column vector of length n_d and `w_r` a row vector of length
//! n_u; DL gain is |h_ad·w_t|², UL gain |w_r·h_ua|², LI gain |w_r·H_aa·w_t|².

use std::fmt;
use std::str::FromStr;

use crate::error::{unsupported, Error, Result};
use crate::linalg::{self, abs2, conj, dot, hermitian_eigen, inner, norm_sqr, normalized, scale, CMat, C};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    MrcMrt,
    MrcZf,
    ZfMrt,
    Optimal,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::MrcMrt, Scheme::MrcZf, Scheme::ZfMrt, Scheme::Optimal];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::MrcMrt => "mrc_mrt",
            Scheme::MrcZf => "mrc_zf",
            Scheme::ZfMrt => "zf_mrt",
            Scheme::Optimal => "optimal",
        }
    }

    /// Antenna-count requirement of the scheme.
    pub fn check_antennas(self, n_u: usize, n_d: usize) -> Result<()> {
        match self {
            Scheme::MrcZf if n_d < 2 => Err(unsupported("mrc_zf", "ZF transmit needs n_d > 1")),
            Scheme::ZfMrt if n_u < 2 => Err(unsupported("zf_mrt", "ZF receive needs n_u > 1")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        match key.as_str() {
            "mrcmrt" => Ok(Scheme::MrcMrt),
            "mrczf" => Ok(Scheme::MrcZf),
            "zfmrt" => Ok(Scheme::ZfMrt),
            "optimal" | "opt" => Ok(Scheme::Optimal),
            _ => Err(unsupported(s.to_string(), "unknown scheme")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderPair<T> {
    pub w_t: Vec<C<T>>,
    pub w_r: Vec<C<T>>,
    pub scheme: Scheme,
}

/// Sum-rate coefficients: a1 = P_a·ℓ(x_d)/(P_u·g_ud·d^(−α) + σ²_n),
/// a2 = P_u·ℓ(x_u), a3 = σ²_n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptCoefficients<T> {
    pub a1: T,
    pub a2: T,
    pub a3: T,
}

pub fn log2_1p<T: Real>(x: T) -> T {
    (T::one() + x).ln() / T::two().ln()
}

pub fn mrt<T: Real>(h_ad: &[C<T>]) -> Result<Vec<C<T>>> {
    normalized(&conj(h_ad))
}

pub fn mrc<T: Real>(h_ua: &[C<T>]) -> Result<Vec<C<T>>> {
    normalized(&conj(h_ua))
}

/// h_ad† projected onto the orthogonal complement of (w_r·H_aa)†.
pub fn zf_tx<T: Real>(w_r: &[C<T>], h_aa: &CMat<T>, h_ad: &[C<T>]) -> Result<Vec<C<T>>> {
    if h_ad.len() < 2 {
        return Err(unsupported("zf_tx", "needs n_d > 1"));
    }
    let u = h_aa.vec_mul(w_r);
    let f = conj(h_ad);
    let uu = norm_sqr(&u);
    if !(uu > T::zero()) {
        return mrt(h_ad);
    }
    let k = dot(&u, &f) / C::new(uu, T::zero());
    let w: Vec<_> = f.iter().zip(&u).map(|(fi, ui)| *fi - k * ui.conj()).collect();
    normalized(&w)
}

/// h_ua† (as a row) projected onto the complement of H_aa·w_t.
pub fn zf_rx<T: Real>(w_t: &[C<T>], h_aa: &CMat<T>, h_ua: &[C<T>]) -> Result<Vec<C<T>>> {
    if h_ua.len() < 2 {
        return Err(unsupported("zf_rx", "needs n_u > 1"));
    }
    let v = h_aa.mul_vec(w_t);
    let vv = norm_sqr(&v);
    if !(vv > T::zero()) {
        return mrc(h_ua);
    }
    let k = inner(h_ua, &v) / C::new(vv, T::zero());
    let w: Vec<_> = h_ua.iter().zip(&v).map(|(hi, vi)| hi.conj() - k * vi.conj()).collect();
    normalized(&w)
}

/// MVDR receiver h_ua†·(P_a·v·v† + a3·I)⁻¹ with v = H_aa·w_t, via Sherman–Morrison.
pub fn optimal_receiver<T: Real>(w_t: &[C<T>], h_aa: &CMat<T>, h_ua: &[C<T>], p_a: T, a3: T) -> Result<Vec<C<T>>> {
    if !(a3 > T::zero()) {
        return Err(Error::Domain("optimal receiver needs a3 > 0".into()));
    }
    let v = h_aa.mul_vec(w_t);
    let k = scale(inner(&v, h_ua), p_a / (a3 + p_a * norm_sqr(&v)));
    let x: Vec<_> = h_ua.iter().zip(&v).map(|(hi, vi)| *hi - k * *vi).collect();
    normalized(&conj(&x))
}

/// Subtracted LI term t(w_t) = P_a·|h_ua†H_aa w_t|²/(a3 + P_a·‖H_aa w_t‖²).
pub fn li_penalty<T: Real>(w_t: &[C<T>], h_aa: &CMat<T>, h_ua: &[C<T>], p_a: T, a3: T) -> T {
    let v = h_aa.mul_vec(w_t);
    p_a * abs2(inner(h_ua, &v)) / (a3 + p_a * norm_sqr(&v))
}

/// UL rate of the MVDR receiver for a given w_t, in quadratic form.
pub fn max_ul_rate_given_wt<T: Real>(w_t: &[C<T>], h_aa: &CMat<T>, h_ua: &[C<T>], p_a: T, a2: T, a3: T) -> T {
    let t = li_penalty(w_t, h_aa, h_ua, p_a, a3);
    let x = (a2 / a3) * (norm_sqr(h_ua) - t);
    log2_1p(x.max(T::zero()))
}

/// Same rate as `max_ul_rate_given_wt`, from a2·h_ua†(P_a·v·v† + a3·I)⁻¹h_ua.
pub fn max_ul_rate_by_inverse<T: Real>(w_t: &[C<T>], h_aa: &CMat<T>, h_ua: &[C<T>], p_a: T, a2: T, a3: T) -> Result<T> {
    let v = h_aa.mul_vec(w_t);
    let n = h_ua.len();
    let m = CMat::outer(&v, &v).scaled(p_a).add_scaled(&CMat::identity(n), a3);
    let y = m.solve(h_ua)?;
    Ok(log2_1p(a2 * inner(h_ua, &y).re))
}

/// max |f†w|² over unit w with w†Qw ≤ 0, for Hermitian Q with λ_min < 0.
/// Stationary points are w(s) ∝ (I + sQ)⁻¹f; the constraint value along s is
/// strictly decreasing on [0, −1/λ_min), so bisection finds the KKT point.
/// When f has no weight on the λ_min eigenspace the constraint may stay
/// positive up to the pole; the optimum then blends in a λ_min eigenvector.
fn inner_qcqp<T: Real>(f: &[C<T>], q: &CMat<T>) -> Vec<C<T>> {
    let n = f.len();
    let eig = hermitian_eigen(q);
    let lmin = eig.values[0];
    let vt = eig.vectors.adjoint();
    let c = vt.mul_vec(f);
    let back = |y: &[C<T>]| eig.vectors.mul_vec(y);
    let at = |s: T, skip_min: bool| -> Vec<C<T>> {
        (0..n)
            .map(|i| {
                let den = T::one() + s * eig.values[i];
                if skip_min && den <= T::zero() {
                    linalg::zero()
                } else {
                    scale(c[i], T::one() / den)
                }
            })
            .collect()
    };
    let qval = |y: &[C<T>]| (0..n).fold(T::zero(), |a, i| a + eig.values[i] * abs2(y[i]));
    if qval(&c) <= T::zero() {
        return normalized(&back(&c)).unwrap_or_else(|_| f.to_vec());
    }
    let s_max = -T::one() / lmin;
    let near = s_max * (T::one() - T::of(1e-12));
    if qval(&at(near, false)) > T::zero() {
        let tol = T::of(1e-12) * eig.values.iter().fold(T::zero(), |a, l| a.max(l.abs()));
        let y = at(s_max, true);
        let y: Vec<_> = (0..n).map(|i| if eig.values[i] <= lmin + tol { linalg::zero() } else { y[i] }).collect();
        let nu = norm_sqr(&y);
        let qu = qval(&y) / nu;
        let b2 = qu / (qu - lmin);
        let a = (T::one() - b2).sqrt() / nu.sqrt();
        let b = b2.sqrt();
        let mut out: Vec<_> = y.iter().map(|z| scale(*z, a)).collect();
        out[0] = out[0] + C::new(b, T::zero());
        return normalized(&back(&out)).unwrap_or_else(|_| f.to_vec());
    }
    let (mut lo, mut hi) = (T::zero(), near);
    for _ in 0..200 {
        let mid = (lo + hi) * T::half();
        if !(mid > lo && mid < hi) {
            break;
        }
        if qval(&at(mid, false)) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    normalized(&back(&at(hi, false))).unwrap_or_else(|_| f.to_vec())
}

fn sum_rate<T: Real>(w_t: &[C<T>], h_ad: &[C<T>], h_ua: &[C<T>], h_aa: &CMat<T>, k: &OptCoefficients<T>, p_a: T) -> T {
    log2_1p(k.a1 * abs2(dot(h_ad, w_t))) + max_ul_rate_given_wt(w_t, h_aa, h_ua, p_a, k.a2, k.a3)
}

/// Joint sum-rate maximization over w_t (w_r follows as the MVDR receiver).
/// The LI term t is swept on `grid_size` uniform points of [0, t(MRT)]; for
/// each t the DL gain is maximized subject to t(w_t) ≤ t. The grid endpoints
/// are the ZF and MRT transmitters. Ties go to the smaller t.
pub fn optimal_joint<T: Real>(
    h_ad: &[C<T>],
    h_ua: &[C<T>],
    h_aa: &CMat<T>,
    coeffs: &OptCoefficients<T>,
    p_a: T,
    grid_size: usize,
) -> Result<(PrecoderPair<T>, T)> {
    if !(coeffs.a3 > T::zero()) {
        return Err(unsupported("optimal", "needs a3 = σ²_n > 0"));
    }
    if grid_size < 2 {
        return Err(crate::error::invalid("grid_size", "must be ≥ 2"));
    }
    let n_d = h_ad.len();
    let f = conj(h_ad);
    let w_mrt = normalized(&f)?;
    let finish = |w_t: Vec<C<T>>| -> Result<(PrecoderPair<T>, T)> {
        let rate = sum_rate(&w_t, h_ad, h_ua, h_aa, coeffs, p_a);
        let w_r = optimal_receiver(&w_t, h_aa, h_ua, p_a, coeffs.a3)?;
        Ok((PrecoderPair { w_t, w_r, scheme: Scheme::Optimal }, rate))
    };
    let t_mrt = li_penalty(&w_mrt, h_aa, h_ua, p_a, coeffs.a3);
    if n_d == 1 || !(t_mrt > T::zero()) {
        return finish(w_mrt);
    }
    let g = h_aa.adjoint().mul_vec(h_ua);
    let m = h_aa.gram().add_scaled(&CMat::identity(n_d), coeffs.a3 / p_a);
    let gg = CMat::outer(&g, &g);
    let mut best: Option<(T, Vec<C<T>>)> = None;
    for k in 0..grid_size {
        let w = if k == 0 {
            // t = 0: transmit in the null space of g†
            let gn = norm_sqr(&g);
            let a = inner(&g, &f) / C::new(gn, T::zero());
            let p: Vec<_> = f.iter().zip(&g).map(|(fi, gi)| *fi - a * *gi).collect();
            match normalized(&p) {
                Ok(w) => w,
                Err(_) => continue,
            }
        } else if k == grid_size - 1 {
            w_mrt.clone()
        } else {
            let t = t_mrt * T::of_usize(k) / T::of_usize(grid_size - 1);
            inner_qcqp(&f, &gg.add_scaled(&m, -t))
        };
        let r = sum_rate(&w, h_ad, h_ua, h_aa, coeffs, p_a);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, w));
        }
    }
    let (_, w) = best.unwrap_or((T::zero(), w_mrt));
    finish(w)
}

/// Precoder pair of a fixed scheme; `Optimal` needs coefficients.
pub fn precoders<T: Real>(
    scheme: Scheme,
    h_ad: &[C<T>],
    h_ua: &[C<T>],
    h_aa: &CMat<T>,
    coeffs: Option<(&OptCoefficients<T>, T, usize)>,
) -> Result<PrecoderPair<T>> {
    scheme.check_antennas(h_ua.len(), h_ad.len())?;
    Ok(match scheme {
        Scheme::MrcMrt => PrecoderPair { w_t: mrt(h_ad)?, w_r: mrc(h_ua)?, scheme },
        Scheme::MrcZf => {
            let w_r = mrc(h_ua)?;
            PrecoderPair { w_t: zf_tx(&w_r, h_aa, h_ad)?, w_r, scheme }
        }
        Scheme::ZfMrt => {
            let w_t = mrt(h_ad)?;
            PrecoderPair { w_r: zf_rx(&w_t, h_aa, h_ua)?, w_t, scheme }
        }
        Scheme::Optimal => {
            let (k, p_a, grid) = coeffs.ok_or_else(|| unsupported("optimal", "needs sum-rate coefficients"))?;
            optimal_joint(h_ad, h_ua, h_aa, k, p_a, grid)?.0
        }
    })
}
