//! User placement on the cell disk and path loss.
//!
//! The AP sits at the origin. DL users form a homogeneous PPP on the disk of
//! radius `r_c`; the UL user is at distance `d` from the scheduled DL user in
//! direction `theta`, measured at the DL user from the DL→AP direction, so
//! that the UL distance to the AP is √(r² + d² − 2rd·cos θ).

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Error, Result};
use crate::real::Real;

pub type Point<T> = [T; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    /// Nearest DL user to the AP.
    #[default]
    Nus,
    /// Uniformly random DL user.
    Rus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig<T> {
    /// DL user density (users/m²).
    pub lambda_d: T,
    /// Cell radius (m).
    pub r_c: T,
    pub alpha: T,
    /// UL–DL user separation (m).
    pub d: T,
    pub p_a: T,
    pub p_u: T,
    pub sigma_n2: T,
    pub sigma_aa2: T,
    pub n_u: usize,
    pub n_d: usize,
    /// HD time fraction of the DL phase.
    pub delta: T,
    pub selection: Selection,
}

impl<T: Real> Default for NetworkConfig<T> {
    fn default() -> Self {
        let p = T::of(10f64.powf(2.5));
        Self {
            lambda_d: T::of(1e-3),
            r_c: T::of(200.0),
            alpha: T::two(),
            d: T::of(25.0),
            p_a: p,
            p_u: p,
            sigma_n2: T::one(),
            sigma_aa2: T::of(0.1),
            n_u: 5,
            n_d: 5,
            delta: T::half(),
            selection: Selection::Nus,
        }
    }
}

impl<T: Real> NetworkConfig<T> {
    /// Every violated invariant, as (field, reason).
    pub fn diagnostics(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &'static str, reason: &str| {
            if !ok {
                out.push((field, reason.to_string()));
            }
        };
        let fin = |x: T| x.is_finite();
        check(fin(self.lambda_d) && self.lambda_d >= T::zero(), "lambda_d", "must be finite and ≥ 0");
        check(fin(self.r_c) && self.r_c > T::zero(), "r_c", "must be finite and > 0");
        check(fin(self.alpha) && self.alpha >= T::two(), "alpha", "must be ≥ 2");
        check(fin(self.d) && self.d >= T::zero(), "d", "must be finite and ≥ 0");
        check(fin(self.p_a) && self.p_a >= T::zero(), "p_a", "must be finite and ≥ 0");
        check(fin(self.p_u) && self.p_u >= T::zero(), "p_u", "must be finite and ≥ 0");
        check(fin(self.sigma_n2) && self.sigma_n2 >= T::zero(), "sigma_n2", "must be finite and ≥ 0");
        check(fin(self.sigma_aa2) && self.sigma_aa2 >= T::zero(), "sigma_aa2", "must be finite and ≥ 0");
        check(self.n_u >= 1, "n_u", "must be ≥ 1");
        check(self.n_d >= 1, "n_d", "must be ≥ 1");
        check(self.delta > T::zero() && self.delta < T::one(), "delta", "must lie in (0, 1)");
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.diagnostics().into_iter().next() {
            None => Ok(()),
            Some((field, reason)) => Err(invalid(field, reason)),
        }
    }

    /// Mean DL user count λπR².
    pub fn mean_users(&self) -> T {
        self.lambda_d * T::pi() * self.r_c * self.r_c
    }
}

/// One spatial realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Drop<T> {
    pub dl_points: Vec<Point<T>>,
    /// Scheduled DL user; `None` when the disk holds no DL user.
    pub dl_point: Option<Point<T>>,
    /// Radius of the scheduled DL user (of the UL anchor for an empty drop).
    pub scheduled_r: T,
    pub scheduled_theta: T,
    pub ul_point: Point<T>,
}

impl<T: Real> Drop<T> {
    pub fn is_empty(&self) -> bool {
        self.dl_point.is_none()
    }

    pub fn ul_distance(&self) -> T {
        dist(self.ul_point, [T::zero(), T::zero()])
    }
}

pub fn dist<T: Real>(a: Point<T>, b: Point<T>) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}

fn uniform_in_disk<T: Real, R: Rng + ?Sized>(r_c: T, rng: &mut R) -> Point<T> {
    let r = r_c * T::of(rng.random::<f64>()).sqrt();
    let phi = T::of(std::f64::consts::TAU * rng.random::<f64>());
    [r * phi.cos(), r * phi.sin()]
}

/// Poisson draw with the given mean; zero for a zero mean.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0)
}

/// Homogeneous PPP of density `lambda_d` on the disk of radius `r_c`.
pub fn sample_ppp<T: Real, R: Rng + ?Sized>(lambda_d: T, r_c: T, rng: &mut R) -> Vec<Point<T>> {
    let mean = (lambda_d * T::pi() * r_c * r_c).to_f64();
    let n = poisson_count(mean, rng);
    (0..n).map(|_| uniform_in_disk(r_c, rng)).collect()
}

pub fn select_dl_user<T: Real, R: Rng + ?Sized>(points: &[Point<T>], mode: Selection, rng: &mut R) -> Option<Point<T>> {
    match mode {
        Selection::Nus => {
            let o = [T::zero(), T::zero()];
            points
                .iter()
                .copied()
                .min_by(|a, b| dist(*a, o).partial_cmp(&dist(*b, o)).unwrap_or(std::cmp::Ordering::Equal))
        }
        Selection::Rus => {
            if points.is_empty() {
                None
            } else {
                Some(points[rng.random_range(0..points.len())])
            }
        }
    }
}

/// UL position at distance `d` from `dl_point` in direction `theta`, measured
/// from the DL→AP direction (the +x axis when the DL user is at the AP).
pub fn ul_point_from_polar<T: Real>(dl_point: Point<T>, theta: T, d: T) -> Point<T> {
    let r = dist(dl_point, [T::zero(), T::zero()]);
    let (ux, uy) = if r > T::zero() { (-dl_point[0] / r, -dl_point[1] / r) } else { (T::one(), T::zero()) };
    let (s, c) = (theta.sin(), theta.cos());
    [dl_point[0] + d * (c * ux - s * uy), dl_point[1] + d * (s * ux + c * uy)]
}

/// Returns (ul_point, theta) with theta uniform on [0, 2π).
pub fn place_ul_user<T: Real, R: Rng + ?Sized>(dl_point: Point<T>, d: T, rng: &mut R) -> (Point<T>, T) {
    let theta = T::of(std::f64::consts::TAU * rng.random::<f64>());
    (ul_point_from_polar(dl_point, theta, d), theta)
}

/// ‖a − b‖^(−α).
pub fn pathloss<T: Real>(a: Point<T>, b: Point<T>, alpha: T) -> Result<T> {
    let r = dist(a, b);
    if !(r > T::zero()) {
        return Err(Error::Domain("path loss is singular at zero distance".into()));
    }
    Ok(r.powf(-alpha))
}

/// (r² + d² − 2rd·cos θ)^(−α/2).
pub fn ul_pathloss_polar<T: Real>(r: T, theta: T, d: T, alpha: T) -> Result<T> {
    let q = r * r + d * d - T::two() * r * d * theta.cos();
    // cancellation can leave a tiny positive residue at exact coincidence
    let scale = (r * r + d * d).max(T::of(1e-300));
    if !(q > T::of(64.0) * T::eps() * scale) {
        return Err(Error::Domain("UL user coincides with the AP".into()));
    }
    Ok(q.powf(-alpha / T::two()))
}

/// Full drop: PPP, selection, UL placement. An empty disk yields an anchor
/// uniform in the disk for the UL user.
pub fn sample_drop<T: Real, R: Rng + ?Sized>(cfg: &NetworkConfig<T>, rng: &mut R) -> Drop<T> {
    let dl_points = sample_ppp(cfg.lambda_d, cfg.r_c, rng);
    let dl_point = select_dl_user(&dl_points, cfg.selection, rng);
    let anchor = dl_point.unwrap_or_else(|| uniform_in_disk(cfg.r_c, rng));
    let (ul_point, theta) = place_ul_user(anchor, cfg.d, rng);
    Drop { dl_points, dl_point, scheduled_r: dist(anchor, [T::zero(), T::zero()]), scheduled_theta: theta, ul_point }
}

/// Same law as `sample_drop` for the scheduled user, without materializing
/// the point set: NUS radius R·√(1 − V^(1/N)) for N ~ Poisson(λπR²), RUS
/// radius R·√U. `dl_points` holds only the scheduled user.
pub fn sample_drop_fast<T: Real, R: Rng + ?Sized>(cfg: &NetworkConfig<T>, rng: &mut R) -> Drop<T> {
    let n = poisson_count(cfg.mean_users().to_f64(), rng);
    let r_c = cfg.r_c.to_f64();
    let r = if n == 0 {
        None
    } else {
        let u: f64 = rng.random();
        Some(match cfg.selection {
            // 1 − V^(1/N) computed without cancellation
            Selection::Nus => r_c * (-(u.ln() / n as f64).exp_m1()).sqrt(),
            Selection::Rus => r_c * u.sqrt(),
        })
    };
    let (dl_point, r_anchor) = match r {
        Some(r) => {
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            (Some([T::of(r * phi.cos()), T::of(r * phi.sin())]), T::of(r))
        }
        None => {
            let a = uniform_in_disk(cfg.r_c, rng);
            (None, dist(a, [T::zero(), T::zero()]))
        }
    };
    let anchor = dl_point.unwrap_or([r_anchor, T::zero()]);
    let (ul_point, theta) = place_ul_user(anchor, cfg.d, rng);
    Drop { dl_points: dl_point.into_iter().collect(), dl_point, scheduled_r: r_anchor, scheduled_theta: theta, ul_point }
}
