//! Rayleigh small-scale fading for one trial.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::geometry::NetworkConfig;
use crate::linalg::{CMat, C};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    /// AP→DL row vector, length n_d.
    pub h_ad: Vec<C<T>>,
    /// UL→AP column vector, length n_u.
    pub h_ua: Vec<C<T>>,
    /// Residual loopback channel, n_u × n_d.
    pub h_aa: CMat<T>,
    /// |h_ud|², unit-mean exponential.
    pub g_ud: T,
}

/// CN(0, var): real and imaginary parts each N(0, var/2).
pub fn complex_normal<T: Real, R: Rng + ?Sized>(var: f64, rng: &mut R) -> C<T> {
    let s = (0.5 * var).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::of(s * re), T::of(s * im))
}

pub fn complex_normal_vec<T: Real, R: Rng + ?Sized>(n: usize, var: f64, rng: &mut R) -> Vec<C<T>> {
    (0..n).map(|_| complex_normal(var, rng)).collect()
}

pub fn draw_realization<T: Real, R: Rng + ?Sized>(cfg: &NetworkConfig<T>, rng: &mut R) -> ChannelRealization<T> {
    let h_ad = complex_normal_vec(cfg.n_d, 1.0, rng);
    let h_ua = complex_normal_vec(cfg.n_u, 1.0, rng);
    let var = cfg.sigma_aa2.to_f64();
    let h_aa = if var > 0.0 {
        CMat::from_fn(cfg.n_u, cfg.n_d, |_, _| complex_normal(var, rng))
    } else {
        CMat::zeros(cfg.n_u, cfg.n_d)
    };
    let g: f64 = Exp1.sample(rng);
    ChannelRealization { h_ad, h_ua, h_aa, g_ud: T::of(g) }
}
