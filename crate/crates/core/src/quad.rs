//! Globally adaptive Gauss–Legendre quadrature.
//!
//! Each panel carries a coarse rule over the whole panel and the same rule
//! applied to both halves; their difference is the panel error estimate. The
//! panel with the largest estimate is bisected until the summed estimate
//! meets the tolerance. Semi-infinite ranges use `t = a − s·ln(u)`.

use std::collections::BinaryHeap;

use crate::real::{KahanSum, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub est_error: T,
    pub converged: bool,
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed in the target precision.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = T::of(guess);
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::eps() * T::of(4.0) {
                    let (_, d) = legendre(n, x);
                    dp = d;
                    break;
                }
            }
            nodes.push(x);
            weights.push(T::two() / ((T::one() - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Fixed-order rule on [a, b].
    pub fn apply<F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T) -> T {
        let h = (b - a) * T::half();
        let c = (b + a) * T::half();
        let mut s = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += *w * f(c + h * *x);
        }
        s * h
    }
}

/// Legendre polynomial P_n and its derivative.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::of_usize(k);
        let p2 = ((T::two() * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let d = T::of_usize(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    rule: GaussLegendre<T>,
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
}

struct Panel<T> {
    a: T,
    b: T,
    left: T,
    right: T,
    err: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&o.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self::new(T::of(1e-10))
    }
}

impl<T: Real> Quadrature<T> {
    pub fn new(rel_tol: T) -> Self {
        Self { rule: GaussLegendre::new(10), rel_tol, abs_tol: T::of(1e-300), max_panels: 2000 }
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_panels(mut self, n: usize) -> Self {
        self.max_panels = n;
        self
    }

    fn split<F: FnMut(T) -> T>(&self, f: &mut F, a: T, b: T, whole: T) -> Panel<T> {
        let m = (a + b) * T::half();
        let left = self.rule.apply(f, a, m);
        let right = self.rule.apply(f, m, b);
        let err = (whole - (left + right)).abs();
        Panel { a, b, left, right, err }
    }

    /// Integral of `f` over the finite interval [a, b].
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> QuadResult<T> {
        self.integrate_breaks(&mut f, &[a, b])
    }

    /// Integral over consecutive intervals between sorted break points.
    pub fn integrate_breaks<F: FnMut(T) -> T>(&self, f: &mut F, pts: &[T]) -> QuadResult<T> {
        let mut heap = BinaryHeap::new();
        for w in pts.windows(2) {
            if w[1] > w[0] {
                let whole = self.rule.apply(f, w[0], w[1]);
                heap.push(self.split(f, w[0], w[1], whole));
            }
        }
        let mut frozen: Vec<Panel<T>> = Vec::new();
        let total = |h: &BinaryHeap<Panel<T>>, fr: &[Panel<T>]| {
            let mut v = KahanSum::default();
            let mut e = T::zero();
            for p in h.iter().chain(fr.iter()) {
                v.add(p.left + p.right);
                e += p.err;
            }
            (v.value(), e)
        };
        let mut panels = heap.len();
        let (mut value, mut err) = total(&heap, &frozen);
        loop {
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if err <= target {
                // running sums drift; confirm with an exact recount
                let (v, e) = total(&heap, &frozen);
                value = v;
                err = e;
                if err <= self.abs_tol.max(self.rel_tol * value.abs()) {
                    return QuadResult { value, est_error: err, converged: true };
                }
            }
            if panels >= self.max_panels || heap.is_empty() {
                let (value, err) = total(&heap, &frozen);
                return QuadResult { value, est_error: err, converged: false };
            }
            let Some(worst) = heap.pop() else { unreachable!() };
            let m = (worst.a + worst.b) * T::half();
            if !(m > worst.a && m < worst.b) {
                // below floating-point resolution
                frozen.push(worst);
                continue;
            }
            let l = self.split(f, worst.a, m, worst.left);
            let r = self.split(f, m, worst.b, worst.right);
            value += l.left + l.right + r.left + r.right - worst.left - worst.right;
            err += l.err + r.err - worst.err;
            heap.push(l);
            heap.push(r);
            panels += 1;
        }
    }

    /// Integral of `f` over [a, ∞) through the substitution t = a − scale·ln(u).
    pub fn integrate_semi_inf<F: FnMut(T) -> T>(&self, mut f: F, a: T, scale: T) -> QuadResult<T> {
        let g = |u: T| {
            if u <= T::zero() {
                return T::zero();
            }
            let t = a - scale * u.ln();
            let v = f(t);
            if v == T::zero() {
                T::zero()
            } else {
                v * scale / u
            }
        };
        self.integrate(g, T::zero(), T::one())
    }
}
