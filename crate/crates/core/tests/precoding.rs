use fdsim::channel::complex_normal_vec;
use fdsim::linalg::{abs2, dot, hermitian_eigen, inner, norm, norm_sqr, CMat, C};
use fdsim::precoding::*;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cmat(rows: usize, cols: usize, var: f64, rng: &mut ChaCha8Rng) -> CMat<f64> {
    let v = complex_normal_vec::<f64, _>(rows * cols, var, rng);
    CMat::from_fn(rows, cols, |i, j| v[i * cols + j])
}

fn unit_random(n: usize, rng: &mut ChaCha8Rng) -> Vec<C<f64>> {
    let v = complex_normal_vec::<f64, _>(n, 1.0, rng);
    let s = 1.0 / norm(&v);
    v.iter().map(|z| z * s).collect()
}

/// Unit vectors (cos a, sin a·e^{iφ}) on an na × nphi grid; covers C² up to phase.
fn sphere2(na: usize, nphi: usize) -> impl Iterator<Item = Vec<C<f64>>> {
    (0..=na).flat_map(move |i| {
        let a = std::f64::consts::FRAC_PI_2 * i as f64 / na as f64;
        (0..nphi).map(move |j| {
            let p = std::f64::consts::TAU * j as f64 / nphi as f64;
            vec![Complex::new(a.cos(), 0.0), Complex::from_polar(a.sin(), p)]
        })
    })
}

#[test]
fn matched_filters_beat_random_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = complex_normal_vec::<f64, _>(4, 1.0, &mut rng);
    let best_t = abs2(dot(&h, &mrt(&h).unwrap()));
    let best_r = abs2(dot(&mrc(&h).unwrap(), &h));
    assert!((norm(&mrc(&h).unwrap()) - 1.0).abs() < 1e-12);
    for _ in 0..10_000 {
        let w = unit_random(4, &mut rng);
        assert!(abs2(dot(&h, &w)) <= best_t + 1e-12);
        assert!(abs2(dot(&w, &h)) <= best_r + 1e-12);
    }
}

#[test]
fn zf_pairs_null_the_loopback() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..10_000 {
        let (n_u, n_d) = (2 + i % 3, 2 + (i / 3) % 3);
        let h_ad = complex_normal_vec::<f64, _>(n_d, 1.0, &mut rng);
        let h_ua = complex_normal_vec::<f64, _>(n_u, 1.0, &mut rng);
        let h_aa = cmat(n_u, n_d, 0.1, &mut rng);
        let fro = h_aa.frobenius_sqr();
        for s in [Scheme::MrcZf, Scheme::ZfMrt] {
            let p = precoders(s, &h_ad, &h_ua, &h_aa, None).unwrap();
            assert!((norm(&p.w_t) - 1.0).abs() < 1e-12 && (norm(&p.w_r) - 1.0).abs() < 1e-12);
            let li = abs2(dot(&p.w_r, &h_aa.mul_vec(&p.w_t)));
            assert!(li <= 1e-20 * fro, "{s}: {li}");
        }
    }
}

#[test]
fn zf_tx_matches_constrained_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let h_ad = complex_normal_vec::<f64, _>(2, 1.0, &mut rng);
        let h_ua = complex_normal_vec::<f64, _>(2, 1.0, &mut rng);
        let h_aa = cmat(2, 2, 1.0, &mut rng);
        let w_r = mrc(&h_ua).unwrap();
        let got = abs2(dot(&h_ad, &zf_tx(&w_r, &h_aa, &h_ad).unwrap()));
        // n_d = 2: the null constraint leaves one direction; a fine sphere
        // grid filtered to near-feasible points must not beat it
        let u = h_aa.vec_mul(&w_r);
        let mut best: f64 = 0.0;
        for w in sphere2(2000, 400) {
            if abs2(dot(&u, &w)) <= 1e-5 * norm_sqr(&u) {
                best = best.max(abs2(dot(&h_ad, &w)));
            }
        }
        assert!(best <= got * (1.0 + 1e-2) + 1e-9, "grid {best} vs zf {got}");
        assert!((best - got).abs() < 1e-2 * got.max(1e-3), "grid {best} vs zf {got}");
    }
}

#[test]
fn optimal_receiver_maximizes_generalized_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (p_a, a3) = (31.6, 1.0);
    let h_ua = complex_normal_vec::<f64, _>(3, 1.0, &mut rng);
    let h_aa = cmat(3, 2, 0.1, &mut rng);
    let w_t = unit_random(2, &mut rng);
    let v = h_aa.mul_vec(&w_t);
    let quotient = |w: &[C<f64>]| abs2(dot(w, &h_ua)) / (p_a * abs2(dot(w, &v)) + a3 * norm_sqr(w));
    let w_r = optimal_receiver(&w_t, &h_aa, &h_ua, p_a, a3).unwrap();
    let q = quotient(&w_r);
    for _ in 0..10_000 {
        assert!(quotient(&unit_random(3, &mut rng)) <= q * (1.0 + 1e-12));
    }
    // eigen oracle: top eigenvalue of B^(−1/2)·h·h†·B^(−1/2), B = P_a·vv† + a3·I
    let b = CMat::outer(&v, &v).scaled(p_a).add_scaled(&CMat::identity(3), a3);
    let eb = hermitian_eigen(&b);
    let inv_sqrt = CMat::from_fn(3, 3, |i, j| {
        (0..3).fold(Complex::new(0.0, 0.0), |acc, k| {
            acc + eb.vectors[(i, k)] * eb.vectors[(j, k)].conj() / eb.values[k].sqrt()
        })
    });
    let y = inv_sqrt.mul_vec(&h_ua);
    let top = *hermitian_eigen(&CMat::outer(&y, &y)).values.last().unwrap();
    assert!(((q - top) / top).abs() < 1e-8);
    // degenerate cases
    let z = CMat::zeros(3, 2);
    let m = optimal_receiver(&w_t, &z, &h_ua, p_a, a3).unwrap();
    for (x, y) in m.iter().zip(&mrc(&h_ua).unwrap()) {
        assert!((x - y).norm() < 1e-14);
    }
    let one = optimal_receiver(&w_t, &cmat(1, 2, 0.1, &mut rng), &h_ua[..1], p_a, a3).unwrap();
    assert!((one[0].norm() - 1.0).abs() < 1e-14);
}

#[test]
fn sherman_morrison_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..1000 {
        let n_u = rng.random_range(1..5);
        let n_d = rng.random_range(1..5);
        let h_ua = complex_normal_vec::<f64, _>(n_u, 1.0, &mut rng);
        let h_aa = cmat(n_u, n_d, 0.3, &mut rng);
        let w_t = unit_random(n_d, &mut rng);
        let (p_a, a2, a3) = (100.0, 2.5, 0.7);
        let q = max_ul_rate_given_wt(&w_t, &h_aa, &h_ua, p_a, a2, a3);
        let m = max_ul_rate_by_inverse(&w_t, &h_aa, &h_ua, p_a, a2, a3).unwrap();
        assert!(((q - m) / m).abs() < 1e-10);
        // equals the rate realized by the MVDR receiver
        let w_r = optimal_receiver(&w_t, &h_aa, &h_ua, p_a, a3).unwrap();
        let sinr = a2 * abs2(dot(&w_r, &h_ua)) / (p_a * abs2(dot(&w_r, &h_aa.mul_vec(&w_t))) + a3);
        assert!(((1.0 + sinr).log2() - q).abs() < 1e-10);
    }
    let h_ua = complex_normal_vec::<f64, _>(2, 1.0, &mut rng);
    let r = max_ul_rate_given_wt(&unit_random(2, &mut rng), &CMat::zeros(2, 2), &h_ua, 5.0, 2.0, 0.5);
    assert!((r - (1.0 + 4.0 * norm_sqr(&h_ua)).log2()).abs() < 1e-14);
}

#[test]
fn zf_transmit_minimizes_the_li_penalty() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..200 {
        let h_ad = complex_normal_vec::<f64, _>(3, 1.0, &mut rng);
        let h_ua = complex_normal_vec::<f64, _>(2, 1.0, &mut rng);
        let h_aa = cmat(2, 3, 0.1, &mut rng);
        let w_zf = zf_tx(&mrc(&h_ua).unwrap(), &h_aa, &h_ad).unwrap();
        let a = max_ul_rate_given_wt(&mrt(&h_ad).unwrap(), &h_aa, &h_ua, 300.0, 3.0, 1.0);
        let b = max_ul_rate_given_wt(&w_zf, &h_aa, &h_ua, 300.0, 3.0, 1.0);
        assert!(a <= b + 1e-12);
    }
}

fn sum_rate(w: &[C<f64>], h_ad: &[C<f64>], h_ua: &[C<f64>], h_aa: &CMat<f64>, k: &OptCoefficients<f64>, p_a: f64) -> f64 {
    (1.0 + k.a1 * abs2(dot(h_ad, w))).log2() + max_ul_rate_given_wt(w, h_aa, h_ua, p_a, k.a2, k.a3)
}

fn fixed_pair_rate(p: &PrecoderPair<f64>, h_ad: &[C<f64>], h_ua: &[C<f64>], h_aa: &CMat<f64>, k: &OptCoefficients<f64>, p_a: f64) -> f64 {
    let dl = (1.0 + k.a1 * abs2(dot(h_ad, &p.w_t))).log2();
    let ul = k.a2 * abs2(dot(&p.w_r, h_ua)) / (p_a * abs2(dot(&p.w_r, &h_aa.mul_vec(&p.w_t))) + k.a3);
    dl + (1.0 + ul).log2()
}

#[test]
fn optimal_joint_without_coupling() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let h_ad = complex_normal_vec::<f64, _>(3, 1.0, &mut rng);
    let h_ua = complex_normal_vec::<f64, _>(2, 1.0, &mut rng);
    let k = OptCoefficients { a1: 2.0, a2: 3.0, a3: 1.0 };
    let (p, r) = optimal_joint(&h_ad, &h_ua, &CMat::zeros(2, 3), &k, 100.0, 50).unwrap();
    let want = (1.0 + 2.0 * norm_sqr(&h_ad)).log2() + (1.0 + 3.0 * norm_sqr(&h_ua)).log2();
    assert!((r - want).abs() < 1e-12);
    assert!((abs2(inner(&p.w_t, &mrt(&h_ad).unwrap())) - 1.0).abs() < 1e-12);
    assert!(optimal_joint(&h_ad, &h_ua, &CMat::zeros(2, 3), &OptCoefficients { a3: 0.0, ..k }, 1.0, 10).is_err());
    assert!(optimal_joint(&h_ad, &h_ua, &CMat::zeros(2, 3), &k, 1.0, 1).is_err());
}

#[test]
fn optimal_joint_dominates_and_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..10 {
        let h_ad = complex_normal_vec::<f64, _>(2, 1.0, &mut rng);
        let h_ua = complex_normal_vec::<f64, _>(2, 1.0, &mut rng);
        let h_aa = cmat(2, 2, 0.1, &mut rng);
        let p_a = 316.0;
        let k = OptCoefficients { a1: rng.random_range(0.1..50.0), a2: rng.random_range(0.1..50.0), a3: 1.0 };
        let (p, r) = optimal_joint(&h_ad, &h_ua, &h_aa, &k, p_a, 200).unwrap();
        assert!((norm(&p.w_t) - 1.0).abs() < 1e-12 && (norm(&p.w_r) - 1.0).abs() < 1e-12);
        assert!((fixed_pair_rate(&p, &h_ad, &h_ua, &h_aa, &k, p_a) - r).abs() < 1e-10);
        for s in [Scheme::MrcMrt, Scheme::MrcZf, Scheme::ZfMrt] {
            let q = precoders(s, &h_ad, &h_ua, &h_aa, None).unwrap();
            assert!(r >= fixed_pair_rate(&q, &h_ad, &h_ua, &h_aa, &k, p_a) - 1e-6, "{s}");
        }
        let brute = sphere2(300, 300).map(|w| sum_rate(&w, &h_ad, &h_ua, &h_aa, &k, p_a)).fold(f64::MIN, f64::max);
        assert!(r >= brute - 1e-3, "optimal {r} vs brute {brute}");
    }
}

#[test]
fn optimal_joint_is_monotone_on_nested_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..20 {
        let h_ad = complex_normal_vec::<f64, _>(3, 1.0, &mut rng);
        let h_ua = complex_normal_vec::<f64, _>(3, 1.0, &mut rng);
        let h_aa = cmat(3, 3, 0.5, &mut rng);
        let k = OptCoefficients { a1: 5.0, a2: 8.0, a3: 1.0 };
        let mut prev = f64::MIN;
        for g in [2, 3, 5, 9, 17, 33] {
            let (_, r) = optimal_joint(&h_ad, &h_ua, &h_aa, &k, 316.0, g).unwrap();
            assert!(r >= prev - 1e-12);
            prev = r;
        }
    }
}
