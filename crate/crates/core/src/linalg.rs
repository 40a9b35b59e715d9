//! Small dense complex linear algebra (dimensions up to a few dozen).
//!
//! Vectors are plain slices of `Complex<T>`; whether a vector is a row or a
//! column is a convention of the caller. `dot` is the bilinear product
//! Σ aᵢbᵢ and `inner` is the sesquilinear Σ conj(aᵢ)bᵢ.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

pub type C<T> = Complex<T>;

pub fn c<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

pub fn zero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn abs2<T: Real>(z: C<T>) -> T {
    z.re * z.re + z.im * z.im
}

pub fn scale<T: Real>(z: C<T>, s: T) -> C<T> {
    Complex::new(z.re * s, z.im * s)
}

pub fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(zero(), |acc, (x, y)| acc + x.conj() * *y)
}

pub fn norm_sqr<T: Real>(a: &[C<T>]) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + abs2(*z))
}

pub fn norm<T: Real>(a: &[C<T>]) -> T {
    norm_sqr(a).sqrt()
}

pub fn conj<T: Real>(a: &[C<T>]) -> Vec<C<T>> {
    a.iter().map(|z| z.conj()).collect()
}

/// Unit vector along `a`; domain error for the zero vector.
pub fn normalized<T: Real>(a: &[C<T>]) -> Result<Vec<C<T>>> {
    let n = norm(a);
    if !(n > T::zero()) || !n.is_finite() {
        return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
    }
    let inv = T::one() / n;
    Ok(a.iter().map(|z| scale(*z, inv)).collect())
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Outer product a·b† of two column vectors.
    pub fn outer(a: &[C<T>], b: &[C<T>]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_sqr(&self) -> T {
        norm_sqr(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }

    /// A·x for a column vector x.
    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// y·A for a row vector y.
    pub fn vec_mul(&self, y: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![zero(); self.cols];
        for (i, yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + *yi * *a;
            }
        }
        out
    }

    pub fn matmul(&self, b: &Self) -> Self {
        assert_eq!(self.cols, b.rows);
        let mut out = Self::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..b.cols {
                    out[(i, j)] = out[(i, j)] + a * b[(k, j)];
                }
            }
        }
        out
    }

    /// A†A.
    pub fn gram(&self) -> Self {
        self.adjoint().matmul(self)
    }

    pub fn add_scaled(&self, other: &Self, s: T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| *a + scale(*b, s)).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| scale(*z, s)).collect() }
    }

    /// Hermitian form x†·A·x (real part; exact for Hermitian A).
    pub fn quad_form(&self, x: &[C<T>]) -> T {
        inner(x, &self.mul_vec(x)).re
    }

    /// Solves A·x = b by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        assert_eq!(b.len(), n);
        let mut a = self.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| abs2(a[(i, k)]).partial_cmp(&abs2(a[(j, k)])).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(k);
            if !(abs2(a[(p, k)]) > T::zero()) {
                return Err(Error::Domain("singular matrix".into()));
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                x.swap(p, k);
            }
            let piv = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / piv;
                if abs2(f) == T::zero() {
                    continue;
                }
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - f * v;
                }
                let v = x[k];
                x[i] = x[i] - f * v;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s = s - a[(k, j)] * x[j];
            }
            x[k] = s / a[(k, k)];
        }
        Ok(x)
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Ascending eigenvalues.
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: CMat<T>,
}

/// Cyclic complex Jacobi. Each rotation is U = D·G with D = diag(1, e^(−iφ))
/// on the (p, q) plane making the pivot real, and G the real Jacobi rotation.
pub fn hermitian_eigen<T: Real>(a: &CMat<T>) -> HermitianEigen<T> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.clone();
    // enforce exact Hermitian symmetry
    for i in 0..n {
        m[(i, i)].im = T::zero();
        for j in i + 1..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * Complex::new(T::half(), T::zero());
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    let mut v = CMat::identity(n);
    let scale_ref = m.frobenius_sqr().sqrt().max(T::of(1e-300));
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += abs2(m[(i, j)]);
            }
        }
        if off.sqrt() <= T::eps() * scale_ref {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = abs2(apq).sqrt();
                if r <= T::eps() * T::eps() * scale_ref {
                    continue;
                }
                let e = Complex::new(apq.re / r, apq.im / r);
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (T::two() * r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = t * cs;
                let ec = e.conj();
                // columns: A ← A·U
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = scale(akp, cs) - scale(akq * ec, sn);
                    m[(k, q)] = scale(akp, sn) + scale(akq * ec, cs);
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = scale(vkp, cs) - scale(vkq * ec, sn);
                    v[(k, q)] = scale(vkp, sn) + scale(vkq * ec, cs);
                }
                // rows: A ← U†·A
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = scale(apk, cs) - scale(aqk * e, sn);
                    m[(q, k)] = scale(apk, sn) + scale(aqk * e, cs);
                }
                m[(p, q)] = zero();
                m[(q, p)] = zero();
                m[(p, p)].im = T::zero();
                m[(q, q)].im = T::zero();
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMat<f64> {
        // deterministic pseudo-random fill
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, n, |_, _| Complex::new(next(), next()))
    }

    #[test]
    fn jacobi_diagonalizes_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (5, 4), (8, 5)] {
            let b = sample(n, seed);
            let a = b.add_scaled(&b.adjoint(), 1.0);
            let eig = hermitian_eigen(&a);
            for k in 0..n {
                let x = eig.vectors.col(k);
                assert!((norm(&x) - 1.0).abs() < 1e-12);
                let ax = a.mul_vec(&x);
                for i in 0..n {
                    assert!((ax[i] - x[i] * eig.values[k]).norm() < 1e-11);
                }
            }
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            let tr: f64 = (0..n).map(|i| a[(i, i)].re).sum();
            assert!((eig.values.iter().sum::<f64>() - tr).abs() < 1e-11);
        }
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = sample(4, 9).add_scaled(&CMat::identity(4), 2.0);
        let x: Vec<C<f64>> = (0..4).map(|i| Complex::new(i as f64, 1.0 - i as f64)).collect();
        let b = a.mul_vec(&x);
        let got = a.solve(&b).unwrap();
        for (g, w) in got.iter().zip(&x) {
            assert!((g - w).norm() < 1e-12);
        }
        assert!(CMat::<f64>::zeros(2, 2).solve(&[zero(), zero()]).is_err());
    }

    #[test]
    fn products_follow_conventions() {
        let a = CMat::from_fn(2, 3, |i, j| Complex::new(i as f64, j as f64));
        let y = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        let x = vec![Complex::new(1.0, 1.0), Complex::new(2.0, 0.0), Complex::new(0.0, -1.0)];
        // (yA)x = y(Ax)
        let l = dot(&a.vec_mul(&y), &x);
        let r = dot(&y, &a.mul_vec(&x));
        assert!((l - r).norm() < 1e-14);
        let g = a.gram();
        assert!((g.quad_form(&x) - norm_sqr(&a.mul_vec(&x))).abs() < 1e-12);
        assert!(normalized::<f64>(&[zero(), zero()]).is_err());
    }
}
