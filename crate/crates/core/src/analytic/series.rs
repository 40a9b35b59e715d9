//! Truncated alternating series of the closed-form CDFs.
//!
//! All of them expand e^(−aυ) on the unit υ-interval, a = λπR², so the k-th
//! term carries aᵏ⁺¹/k!. Around k ≈ a that factor reaches e^a/√(2πa), far
//! beyond double precision at realistic densities; the sums are therefore
//! carried in `f256` with per-term moments exact to that precision.

use f256::f256;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::specfun::{appell_f1, lerch_base, lerch_integral};

use super::EvalSpec;

type H = f256;

/// Number of terms after which aᵏ⁺¹/k! has fallen below 1e-30.
pub(crate) fn adaptive_terms(a: f64) -> usize {
    let mut k = 0usize;
    let mut lt = a.ln(); // ln(aᵏ⁺¹/k!)
    while !(k as f64 > a && lt < -30.0 * std::f64::consts::LN_10) {
        k += 1;
        lt += a.ln() - (k as f64).ln();
        if k > 1_000_000 {
            break;
        }
    }
    k + 1
}

fn term_count(a: f64, spec: &EvalSpec, what: &str) -> Result<usize> {
    match spec.terms {
        Some(k) => Ok(k),
        None => {
            let k = adaptive_terms(a);
            if k > spec.max_terms {
                return Err(Error::NonConvergence(format!(
                    "{what}: needs {k} terms at λπR² = {a}, above the limit {}",
                    spec.max_terms
                )));
            }
            Ok(k)
        }
    }
}

/// Σₖ (−1)ᵏ aᵏ⁺¹/k! · mₖ for k < moments.len(), with the tail and precision
/// checks that decide convergence.
fn alternating(a: f64, moments: &[H], spec: &EvalSpec, what: &str) -> Result<f64> {
    let ah = H::of(a);
    let mut coef = ah;
    let mut sum = H::zero();
    let mut peak = H::zero();
    let mut last = H::zero();
    for (k, m) in moments.iter().enumerate() {
        if k > 0 {
            coef = -coef * ah / H::of_usize(k);
        }
        last = coef * *m;
        sum += last;
        peak = peak.max(last.abs());
    }
    let s = sum.to_f64();
    let tail = last.abs().to_f64();
    if !(tail <= spec.tail * s.abs()) && tail > 1e-300 {
        return Err(Error::NonConvergence(format!(
            "{what}: last of {} terms is {tail:e} against a partial sum of {s:e}",
            moments.len()
        )));
    }
    let lost = peak.to_f64() * H::eps().to_f64() * moments.len() as f64;
    if lost > 1e-13 {
        return Err(Error::NonConvergence(format!(
            "{what}: peak term {:e} exhausts the working precision",
            peak.to_f64()
        )));
    }
    Ok(s)
}

/// I_b(Z) = ∫₀¹ t^(b−1)/(1+Zt) dt at b = (k+1)/p, k < count.
fn lerch_ladder(p: usize, count: usize, zz: H) -> Result<Vec<H>> {
    let mut out = vec![H::zero(); count];
    let pf = H::of_usize(p);
    if zz == H::zero() {
        for (k, v) in out.iter_mut().enumerate() {
            *v = pf / H::of_usize(k + 1);
        }
        return Ok(out);
    }
    if zz <= H::two() {
        for (k, v) in out.iter_mut().enumerate() {
            let r = lerch_integral(H::of_usize(k + 1) / pf, zz);
            *v = r.get("lerch integral")?;
        }
        return Ok(out);
    }
    // Z·I_{b+1} = 1/b − I_b, stable upward for Z > 2
    for q in 1..=p {
        let mut b = H::of_usize(q) / pf;
        let mut v = lerch_base(b, zz).get("lerch base")?;
        let mut k = q - 1;
        while k < count {
            out[k] = v;
            v = (H::one() / b - v) / zz;
            b += H::one();
            k += p;
        }
    }
    Ok(out)
}

/// 1 − Σₖ (−1)ᵏ aᵏ⁺¹/(k+1)!·₂F₁(1, b; b+1; −X), b = (k+1)/p.
///
/// Written with ₂F₁(1, b; b+1; −X) = b·I_b(X) this is
/// 1 − (1/p)·Σₖ (−1)ᵏ aᵏ⁺¹/k!·I_b(X).
pub(crate) fn lerch_cdf(a: f64, p: usize, x: f64, spec: &EvalSpec, what: &str) -> Result<f64> {
    let k = term_count(a, spec, what)?;
    let pf = H::of_usize(p);
    let moments: Vec<H> = lerch_ladder(p, k, H::of(x))?.into_iter().map(|v| v / pf).collect();
    Ok(1.0 - alternating(a, &moments, spec, what)?)
}

/// Mₖ = ∫₀¹ v^(cₖ−1)(v+ε)^(−n) dv with cₖ = (k+1)/p + n.
fn dl_moments(p: usize, n: usize, count: usize, eps: H) -> Result<Vec<H>> {
    let pf = H::of_usize(p);
    let nf = H::of_usize(n);
    let c_of = |k: usize| H::of_usize(k + 1) / pf + nf;
    let mut out = vec![H::zero(); count];
    if eps == H::zero() {
        for (k, v) in out.iter_mut().enumerate() {
            *v = pf / H::of_usize(k + 1);
        }
        return Ok(out);
    }
    if eps > H::half() {
        // Pfaff: (1+ε)^(−n)/c · Σₘ (n)ₘ/(c+1)ₘ wᵐ, w = 1/(1+ε) < 2/3
        let w = H::one() / (H::one() + eps);
        let pre = w.powi(n as i32);
        let tiny = H::eps();
        for (k, v) in out.iter_mut().enumerate() {
            let c = c_of(k);
            let mut term = H::one();
            let mut s = H::one();
            let mut m = 0usize;
            loop {
                let mf = H::of_usize(m);
                term *= (nf + mf) / (c + H::one() + mf) * w;
                s += term;
                m += 1;
                if term < tiny * s {
                    break;
                }
                if m > 100_000 {
                    return Err(Error::NonConvergence("DL moment series".into()));
                }
            }
            *v = pre * s / c;
        }
        return Ok(out);
    }
    // Gⱼ(c) = ∫₀¹ v^(c−1)(v+ε)^(−j) dv, walked upward in c from c₀ = q/p by
    // Gⱼ(c+1) = Gⱼ₋₁(c) − ε·Gⱼ(c), which damps errors by ε per step.
    let z = H::one() / eps;
    let one_eps = H::one() + eps;
    for q in 1..=p {
        let c0 = H::of_usize(q) / pf;
        let mut g = vec![H::zero(); n + 1];
        g[0] = H::one() / c0;
        g[1] = z * lerch_integral(c0, z).get("lerch integral")?;
        for j in 1..n {
            let jf = H::of_usize(j);
            g[j + 1] = ((jf - c0) * g[j] + one_eps.powi(-(j as i32))) / (jf * eps);
        }
        let mut c = c0;
        let mut m = 0usize;
        loop {
            if m >= n {
                let k = q - 1 + p * (m - n);
                if k >= count {
                    break;
                }
                out[k] = g[n];
            }
            for j in (1..=n).rev() {
                g[j] = g[j - 1] - eps * g[j];
            }
            c += H::one();
            g[0] = H::one() / c;
            m += 1;
        }
    }
    Ok(out)
}

/// DL CDF under interference only: e^(−a) + (1/p)·Σₖ (−1)ᵏ aᵏ⁺¹/k!·Mₖ with
/// ε = 1/X the normalized internode term.
pub(crate) fn dl_moment_cdf(a: f64, p: usize, n: usize, eps: f64, spec: &EvalSpec) -> Result<f64> {
    let what = "DL moment series";
    let k = term_count(a, spec, what)?;
    if eps.is_infinite() {
        return Ok((-a).exp());
    }
    let pf = H::of_usize(p);
    let moments: Vec<H> = dl_moments(p, n, k, H::of(eps))?.into_iter().map(|v| v / pf).collect();
    Ok((-a).exp() + alternating(a, &moments, spec, what)?)
}

/// ∫₀^W e^(−μs)·(s² + 2bs + c)^(−1/2) ds for W·μ ≲ 1, by the Euler
/// substitution √Q = √c + s·t and the Appell F₁ form of the moments.
/// `disc` is c − b², passed separately because it is the same on every piece.
fn segment(mu: f64, b: f64, c: f64, disc: f64, w: f64, spec: &EvalSpec) -> Result<f64> {
    let rc = c.sqrt();
    let qw = (w * w + 2.0 * b * w + c).sqrt();
    let rho = (w + 2.0 * b) / (qw + rc);
    let t0 = b / rc;
    let delta = rho - t0;
    let one_t2 = disc / c;
    let x = delta / (1.0 - t0);
    let y = -delta / (1.0 + t0);
    let h = 2.0 * rc * delta / one_t2;
    let mut sum = 0.0;
    let mut coef = 1.0; // (−μh)ᵏ/(k+1)!
    let limit = spec.terms.unwrap_or(200);
    let mut last = f64::INFINITY;
    for k in 0..limit {
        let kf = k as f64;
        if k > 0 {
            coef *= -mu * h / (kf + 1.0);
        }
        let f1 = appell_f1(kf + 1.0, kf + 1.0, kf + 1.0, kf + 2.0, x, y)?.get("Appell F1")?;
        last = coef * f1;
        sum += last;
        if spec.terms.is_none() && last.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    if !(last.abs() <= spec.tail * sum.abs()) {
        return Err(Error::NonConvergence(format!("F1 segment series: last term {last:e}, sum {sum:e}")));
    }
    Ok(2.0 * delta / one_t2 * sum)
}

/// UL Case-1 CDF at α = 2 without noise:
/// 1 − (πλ/κ)·∫₀^{R²} e^(−λπυ)(υ² + 2bυ + c)^(−1/2) dυ,
/// b = 1/κ − d², c = (1/κ + d²)², κ = z·P_a·σ²_aa/P_u.
///
/// The υ-axis is cut into pieces of λπ-width at most one and the Taylor/F₁
/// construction is applied on each piece about its left end, where the
/// quadratic keeps its discriminant c − b² = 4d²/κ.
pub(crate) fn case1_alpha2(lambda: f64, r_c: f64, d: f64, kappa: f64, spec: &EvalSpec) -> Result<f64> {
    let mu = lambda * std::f64::consts::PI;
    let inv = 1.0 / kappa;
    let b = inv - d * d;
    let c = (inv + d * d).powi(2);
    let disc = 4.0 * d * d * inv;
    if !(disc > 0.0) || !disc.is_finite() {
        return Err(Error::Domain("F1 form needs d > 0 and a finite LI term".into()));
    }
    let span = r_c * r_c;
    // F ≈ κ·(R² + d²)/2 there, left over from 1 − (πλ/κ)·(…) ≈ 1 − 1
    if kappa * (span + d * d) < 0.05 {
        return Err(Error::Domain("F1 form cancels for small κ".into()));
    }
    let pieces = ((mu * span).ceil() as usize).max(1);
    let w = span / pieces as f64;
    let mut total = 0.0;
    for j in 0..pieces {
        let u = j as f64 * w;
        let bj = b + u;
        let cj = u * u + 2.0 * b * u + c;
        total += (-mu * u).exp() * segment(mu, bj, cj, disc, w, spec)?;
    }
    let f = 1.0 - mu * inv * total;
    if !f.is_finite() {
        return Err(Error::Domain("F1 form overflowed".into()));
    }
    Ok(f)
}
