//! Instantaneous SINRs and rates of one trial.

use crate::channel::ChannelRealization;
use crate::geometry::{dist, Drop, NetworkConfig};
use crate::linalg::{abs2, dot, C};
use crate::precoding::{log2_1p, OptCoefficients};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome<T> {
    pub sinr_ul: T,
    pub sinr_dl: T,
    pub rate_ul: T,
    pub rate_dl: T,
}

impl<T: Real> TrialOutcome<T> {
    pub fn new(sinr_ul: T, sinr_dl: T) -> Self {
        Self { sinr_ul, sinr_dl, rate_ul: log2_1p(sinr_ul), rate_dl: log2_1p(sinr_dl) }
    }

    pub fn rate_sum(&self) -> T {
        self.rate_ul + self.rate_dl
    }
}

fn ratio<T: Real>(num: T, den: T) -> T {
    if num == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// d^(−α), with 0 for a zero UL power so that d = 0 never forms 0·∞.
fn internode<T: Real>(cfg: &NetworkConfig<T>, g_ud: T) -> T {
    if cfg.p_u == T::zero() || g_ud == T::zero() {
        T::zero()
    } else {
        cfg.p_u * g_ud * cfg.d.powf(-cfg.alpha)
    }
}

/// P_a·ℓ(x_d)·|h_ad·w_t|²/(P_u·g_ud·d^(−α) + σ²_n); zero for an empty drop.
pub fn sinr_dl<T: Real>(drop: &Drop<T>, chan: &ChannelRealization<T>, w_t: &[C<T>], cfg: &NetworkConfig<T>) -> T {
    let Some(x_d) = drop.dl_point else { return T::zero() };
    let r = dist(x_d, [T::zero(), T::zero()]);
    let num = cfg.p_a * r.powf(-cfg.alpha) * abs2(dot(&chan.h_ad, w_t));
    ratio(num, internode(cfg, chan.g_ud) + cfg.sigma_n2)
}

/// P_u·ℓ(x_u)·|w_r·h_ua|²/(P_a·|w_r·H_aa·w_t|² + σ²_n).
pub fn sinr_ul<T: Real>(
    drop: &Drop<T>,
    chan: &ChannelRealization<T>,
    w_t: &[C<T>],
    w_r: &[C<T>],
    cfg: &NetworkConfig<T>,
) -> T {
    let num = cfg.p_u * drop.ul_distance().powf(-cfg.alpha) * abs2(dot(w_r, &chan.h_ua));
    let li = if chan.h_aa.is_zero() { T::zero() } else { cfg.p_a * abs2(dot(w_r, &chan.h_aa.mul_vec(w_t))) };
    ratio(num, li + cfg.sigma_n2)
}

pub fn evaluate<T: Real>(
    drop: &Drop<T>,
    chan: &ChannelRealization<T>,
    w_t: &[C<T>],
    w_r: &[C<T>],
    cfg: &NetworkConfig<T>,
) -> TrialOutcome<T> {
    TrialOutcome::new(sinr_ul(drop, chan, w_t, w_r, cfg), sinr_dl(drop, chan, w_t, cfg))
}

/// Sum-rate coefficients of the joint design for this trial. An empty drop
/// has a1 = 0.
pub fn opt_coefficients<T: Real>(drop: &Drop<T>, chan: &ChannelRealization<T>, cfg: &NetworkConfig<T>) -> OptCoefficients<T> {
    let a1 = match drop.dl_point {
        Some(x_d) => {
            let r = dist(x_d, [T::zero(), T::zero()]);
            ratio(cfg.p_a * r.powf(-cfg.alpha), internode(cfg, chan.g_ud) + cfg.sigma_n2)
        }
        None => T::zero(),
    };
    OptCoefficients { a1, a2: cfg.p_u * drop.ul_distance().powf(-cfg.alpha), a3: cfg.sigma_n2 }
}
