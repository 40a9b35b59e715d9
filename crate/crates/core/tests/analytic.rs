use fdsim::analytic::*;
use fdsim::error::Error;
use fdsim::geometry::{NetworkConfig, Selection};
use fdsim::montecarlo::{estimate_cdf, estimate_fd, estimate_hd, estimate_large_array, HdCondition, McOptions};
use fdsim::precoding::Scheme;

fn defaults() -> NetworkConfig<f64> {
    NetworkConfig::default()
}

fn spec() -> EvalSpec {
    EvalSpec::default()
}

fn ul(cfg: &NetworkConfig<f64>, z: f64, v: UlCdf) -> f64 {
    ul_cdf(cfg, z, v, &spec()).unwrap_or_else(|e| panic!("{v} at z={z}: {e}")).value
}

fn dl(cfg: &NetworkConfig<f64>, z: f64, v: DlCdf) -> f64 {
    dl_cdf(cfg, z, v, &spec()).unwrap_or_else(|e| panic!("{v} at z={z}: {e}")).value
}

#[test]
fn alpha2_series_matches_polar_quadrature() {
    for s2 in [0.01, 0.1] {
        let cfg = NetworkConfig { n_u: 1, n_d: 4, sigma_n2: 0.0, sigma_aa2: s2, ..defaults() };
        for &z in &spec().z_grid {
            let q = ul(&cfg, z, UlCdf::Case1Quadrature);
            let e = ul_cdf(&cfg, z, UlCdf::Case1Alpha2Series, &spec()).unwrap();
            assert!(e.note.is_none(), "series fell back at z={z}: {:?}", e.note);
            assert!((q - e.value).abs() < 1e-6, "σ²_aa={s2} z={z}: {q} vs {}", e.value);
        }
    }
}

#[test]
fn alpha2_series_falls_back_outside_its_range() {
    let cfg = NetworkConfig { n_u: 1, sigma_n2: 0.0, ..defaults() };
    for z in [1e-9, 1e13] {
        let e = ul_cdf(&cfg, z, UlCdf::Case1Alpha2Series, &spec()).unwrap();
        assert!(e.note.as_deref().unwrap_or("").contains("case1_quadrature"));
        assert!((e.value - ul(&cfg, z, UlCdf::Case1Quadrature)).abs() < 1e-12);
    }
    // d = 0 has no F1 form at all
    let at0 = NetworkConfig { d: 0.0, ..cfg };
    assert!(ul_cdf(&at0, 1.0, UlCdf::Case1Alpha2Series, &spec()).unwrap().note.is_some());
}

#[test]
fn alpha4_series_exact_at_zero_distance_and_below_otherwise() {
    let base = NetworkConfig { n_u: 1, alpha: 4.0, sigma_n2: 0.0, ..defaults() };
    let at0 = NetworkConfig { d: 0.0, ..base.clone() };
    for &z in &spec().z_grid {
        let q = ul(&at0, z, UlCdf::Case1Quadrature);
        let s = ul(&at0, z, UlCdf::Case1Alpha4Lb);
        assert!((q - s).abs() < 1e-9, "z={z}: {q} vs {s}");
        // the series ignores d, so it bounds the d = 25 CDF from below
        assert!(ul(&base, z, UlCdf::Case1Quadrature) >= ul(&base, z, UlCdf::Case1Alpha4Lb));
    }
}

#[test]
fn dl_series_paths_agree() {
    for n_d in [1usize, 2, 4] {
        let cfg = NetworkConfig { n_d, sigma_n2: 0.0, ..defaults() };
        for &z in &spec().z_grid {
            let i = dl(&cfg, z, DlCdf::IlIntegral);
            let s = dl(&cfg, z, DlCdf::IlSeries);
            assert!((i - s).abs() < 1e-9, "n_d={n_d} z={z}: {i} vs {s}");
            if n_d == 1 {
                assert!((dl(&cfg, z, DlCdf::Nd1Series) - s).abs() < 1e-9);
            }
            // λπR² ≈ 126, so the unbounded-plane form is indistinguishable
            assert!((dl(&cfg, z, DlCdf::Alpha2Tricomi) - i).abs() < 1e-9);
        }
    }
}

#[test]
fn dl_series_handles_alpha4() {
    let cfg = NetworkConfig { n_d: 2, alpha: 4.0, sigma_n2: 0.0, ..defaults() };
    for z in [0.05, 1.0, 20.0] {
        assert!((dl(&cfg, z, DlCdf::IlIntegral) - dl(&cfg, z, DlCdf::IlSeries)).abs() < 1e-9);
    }
}

#[test]
fn series_truncation_doubling_is_stable() {
    let s = spec();
    let a = defaults().lambda_d * std::f64::consts::PI * 200.0 * 200.0;
    let k = s.series_terms(a);
    let at_k = EvalSpec { terms: Some(k), ..s.clone() };
    let at_2k = EvalSpec { terms: Some(2 * k), ..s.clone() };
    let ul4 = NetworkConfig { n_u: 1, alpha: 4.0, d: 0.0, sigma_n2: 0.0, ..defaults() };
    let dl2 = NetworkConfig { n_d: 2, sigma_n2: 0.0, ..defaults() };
    for &z in &s.z_grid {
        let u1 = ul_cdf(&ul4, z, UlCdf::Case1Alpha4Lb, &at_k).unwrap().value;
        let u2 = ul_cdf(&ul4, z, UlCdf::Case1Alpha4Lb, &at_2k).unwrap().value;
        assert!((u1 - u2).abs() < 1e-6);
        let d1 = dl_cdf(&dl2, z, DlCdf::IlSeries, &at_k).unwrap().value;
        let d2 = dl_cdf(&dl2, z, DlCdf::IlSeries, &at_2k).unwrap().value;
        assert!((d1 - d2).abs() < 1e-6);
    }
}

#[test]
fn short_series_reports_non_convergence() {
    let short = EvalSpec { terms: Some(60), ..spec() };
    let cfg = NetworkConfig { n_d: 2, sigma_n2: 0.0, ..defaults() };
    let r = dl_cdf(&cfg, 1.0, DlCdf::IlSeries, &short);
    assert!(matches!(r, Err(Error::NonConvergence(_))), "{r:?}");
    let capped = EvalSpec { max_terms: 100, ..spec() };
    assert!(matches!(dl_cdf(&cfg, 1.0, DlCdf::IlSeries, &capped), Err(Error::NonConvergence(_))));
}

/// One applicable config per CDF variant.
fn ul_cases() -> Vec<(UlCdf, NetworkConfig<f64>)> {
    let d = defaults();
    vec![
        (UlCdf::Case1Quadrature, NetworkConfig { n_u: 1, ..d.clone() }),
        (UlCdf::Case1Alpha2Series, NetworkConfig { n_u: 1, sigma_n2: 0.0, ..d.clone() }),
        (UlCdf::Case1Alpha4Lb, NetworkConfig { n_u: 1, alpha: 4.0, sigma_n2: 0.0, ..d.clone() }),
        (UlCdf::Case2Il, NetworkConfig { n_d: 1, sigma_n2: 0.0, ..d.clone() }),
        (UlCdf::MrcZf, d.clone()),
        (UlCdf::ZfMrt, d.clone()),
        (UlCdf::DualAlpha2, NetworkConfig { n_u: 1, n_d: 1, ..d }),
    ]
}

fn dl_cases() -> Vec<(DlCdf, NetworkConfig<f64>)> {
    let d = defaults();
    vec![
        (DlCdf::Exact, d.clone()),
        (DlCdf::IlIntegral, NetworkConfig { sigma_n2: 0.0, ..d.clone() }),
        (DlCdf::IlSeries, NetworkConfig { sigma_n2: 0.0, ..d.clone() }),
        (DlCdf::Nd1Series, NetworkConfig { n_d: 1, sigma_n2: 0.0, ..d.clone() }),
        (DlCdf::Alpha2Tricomi, NetworkConfig { sigma_n2: 0.0, ..d.clone() }),
        (DlCdf::Dual, NetworkConfig { n_u: 1, n_d: 1, ..d.clone() }),
        (DlCdf::Dual, NetworkConfig { n_u: 1, n_d: 1, alpha: 4.0, ..d }),
    ]
}

#[test]
fn cdfs_start_at_zero_rise_and_saturate() {
    let grid = spec().z_grid;
    let check = |name: &str, f: &dyn Fn(f64) -> f64| {
        assert!(f(0.0).abs() < 1e-12, "{name}: F(0) = {}", f(0.0));
        let vals: Vec<f64> = grid.iter().map(|&z| f(z)).collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{name} not monotone: {vals:?}");
        }
        assert!((f(1e8) - 1.0).abs() < 1e-2, "{name}: F(1e8) = {}", f(1e8));
    };
    for (v, cfg) in ul_cases() {
        check(v.label(), &|z| ul(&cfg, z, v));
    }
    for (v, cfg) in dl_cases() {
        check(v.label(), &|z| dl(&cfg, z, v));
    }
}

#[test]
fn rates_match_integrated_cdfs() {
    let d = defaults();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let ul_pairs = [
        (UlCdf::Case1Quadrature, UlRate::Case1Exact, NetworkConfig { n_u: 1, ..d.clone() }),
        (UlCdf::Case1Quadrature, UlRate::Case1Exact, NetworkConfig { n_u: 1, alpha: 3.0, sigma_aa2: 0.01, ..d.clone() }),
        (UlCdf::Case2Il, UlRate::Case2Il, NetworkConfig { n_d: 1, n_u: 3, sigma_n2: 0.0, ..d.clone() }),
        (UlCdf::MrcZf, UlRate::MrcZf, d.clone()),
        (UlCdf::ZfMrt, UlRate::ZfMrt, NetworkConfig { alpha: 4.0, ..d.clone() }),
        (UlCdf::DualAlpha2, UlRate::DualUbAlpha2, NetworkConfig { n_u: 1, n_d: 1, ..d.clone() }),
        (UlCdf::Case1Alpha4Lb, UlRate::Case1Alpha4Ub, NetworkConfig { n_u: 1, alpha: 4.0, sigma_n2: 0.0, ..d.clone() }),
    ];
    for (c, r, cfg) in ul_pairs {
        let direct = ul_rate(&cfg, r, &spec()).unwrap().value;
        let via = rate_from_cdf(|z| ul_cdf(&cfg, z, c, &spec()).map(|e| e.value), 1.0, 1e-9).unwrap();
        assert!(rel(direct, via) < 1e-4, "{r}: {direct} vs {via}");
    }
    let dl_pairs = [
        (DlCdf::Exact, DlRate::Exact, d.clone()),
        (DlCdf::Exact, DlRate::Exact, NetworkConfig { n_d: 2, alpha: 4.0, selection: Selection::Rus, ..d.clone() }),
        (DlCdf::IlIntegral, DlRate::Il, NetworkConfig { sigma_n2: 0.0, ..d.clone() }),
        (DlCdf::Nd1Series, DlRate::Nd1, NetworkConfig { n_d: 1, sigma_n2: 0.0, ..d.clone() }),
        (DlCdf::Dual, DlRate::DualUb, NetworkConfig { n_u: 1, n_d: 1, ..d.clone() }),
        (DlCdf::Dual, DlRate::DualUb, NetworkConfig { n_u: 1, n_d: 1, alpha: 4.0, ..d }),
    ];
    for (c, r, cfg) in dl_pairs {
        let direct = dl_rate(&cfg, r, &spec()).unwrap().value;
        let via = rate_from_cdf(|z| dl_cdf(&cfg, z, c, &spec()).map(|e| e.value), 1.0, 1e-9).unwrap();
        assert!(rel(direct, via) < 1e-4, "{r}: {direct} vs {via}");
    }
}

#[test]
fn alpha2_series_rate_matches_exact_rate() {
    let cfg = NetworkConfig { n_u: 1, sigma_n2: 0.0, sigma_aa2: 0.1, ..defaults() };
    let a = ul_rate(&cfg, UlRate::Case1Alpha2, &spec()).unwrap().value;
    let b = ul_rate(&cfg, UlRate::Case1Exact, &spec()).unwrap().value;
    assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
}

#[test]
fn single_antenna_cases_coincide() {
    // with n_u = n_d = 1 the LI gain is exponential, so both UL laws are one
    let cfg = NetworkConfig { n_u: 1, n_d: 1, sigma_n2: 0.0, ..defaults() };
    for z in [0.02, 0.5, 7.0] {
        assert!((ul(&cfg, z, UlCdf::Case1Quadrature) - ul(&cfg, z, UlCdf::Case2Il)).abs() < 1e-9);
    }
    let a = ul_rate(&cfg, UlRate::Case1Exact, &spec()).unwrap().value;
    let b = ul_rate(&cfg, UlRate::Case2Il, &spec()).unwrap().value;
    assert!((a - b).abs() < 1e-7 * a);
}

#[test]
fn dual_forms_are_the_interference_free_limits() {
    let cfg = NetworkConfig { n_u: 1, n_d: 1, ..defaults() };
    let no_li = NetworkConfig { sigma_aa2: 0.0, ..cfg.clone() };
    let no_ud = NetworkConfig { p_u: 0.0, ..cfg.clone() };
    for z in [0.01, 0.3, 4.0, 90.0] {
        assert!((ul(&cfg, z, UlCdf::DualAlpha2) - ul(&no_li, z, UlCdf::Case1Quadrature)).abs() < 1e-7);
        assert!((dl(&cfg, z, DlCdf::Dual) - dl(&no_ud, z, DlCdf::Exact)).abs() < 1e-7);
        let c4 = NetworkConfig { alpha: 4.0, ..no_ud.clone() };
        assert!((dl(&c4, z, DlCdf::Dual) - dl(&c4, z, DlCdf::Exact)).abs() < 1e-7);
    }
    let ub = dl_rate(&cfg, DlRate::DualUb, &spec()).unwrap().value;
    assert!(ub > dl_rate(&cfg, DlRate::Exact, &spec()).unwrap().value);
}

#[test]
fn dual_ul_rate_is_continuous_through_unit_psi() {
    // ψ_u = P_u·λπ/σ²_n = 1 at P_u = 1/(λπ)
    let at = |p_u: f64| {
        let cfg = NetworkConfig { n_u: 1, n_d: 1, p_u, ..defaults() };
        ul_rate(&cfg, UlRate::DualUbAlpha2, &spec()).unwrap().value
    };
    let p1 = 1.0 / (1e-3 * std::f64::consts::PI);
    for f in [0.9, 0.96, 0.999, 1.0, 1.001, 1.04, 1.1] {
        let a = at(p1 * f);
        let b = at(p1 * f * (1.0 + 1e-7));
        assert!((a - b).abs() < 1e-6 * a, "ψ={f}: {a} vs {b}");
    }
}

#[test]
fn dl_cdf_orders_with_powers() {
    let base = defaults();
    for z in [0.1, 1.0, 10.0] {
        let f = |p_a: f64, p_u: f64| dl(&NetworkConfig { p_a, p_u, ..base.clone() }, z, DlCdf::Exact);
        assert!(f(100.0, 316.0) > f(1000.0, 316.0));
        assert!(f(316.0, 100.0) < f(316.0, 1000.0));
    }
}

#[test]
fn il_rate_grows_with_transmit_antennas() {
    let mut prev = 0.0;
    for n_d in 1..=6 {
        let cfg = NetworkConfig { n_d, sigma_n2: 0.0, ..defaults() };
        let r = dl_rate(&cfg, DlRate::Il, &spec()).unwrap().value;
        assert!(r > prev);
        if n_d > 1 {
            let zf = dl_rate(&cfg, DlRate::IlMrcZf, &spec()).unwrap().value;
            assert!(r > zf && (zf - prev).abs() < 1e-9 * prev);
        }
        prev = r;
    }
}

#[test]
fn unsupported_combinations_are_rejected() {
    let d = defaults();
    let s = spec();
    let unsupported = |r: Result<Evaluation, Error>| matches!(r, Err(Error::Unsupported { .. }));
    assert!(unsupported(ul_cdf(&d, 1.0, UlCdf::Case1Quadrature, &s)));
    assert!(unsupported(ul_cdf(&NetworkConfig { n_u: 1, alpha: 3.0, ..d.clone() }, 1.0, UlCdf::Case1Alpha2Series, &s)));
    assert!(unsupported(ul_cdf(&NetworkConfig { n_u: 1, ..d.clone() }, 1.0, UlCdf::ZfMrt, &s)));
    assert!(unsupported(dl_cdf(&NetworkConfig { alpha: 3.0, ..d.clone() }, 1.0, DlCdf::IlSeries, &s)));
    assert!(unsupported(dl_cdf(&NetworkConfig { selection: Selection::Rus, ..d.clone() }, 1.0, DlCdf::IlSeries, &s)));
    assert!(unsupported(dl_rate(&NetworkConfig { n_d: 1, ..d.clone() }, DlRate::IlMrcZf, &s)));
    assert!(matches!(ul_cdf(&d, -1.0, UlCdf::MrcZf, &s), Err(Error::InvalidParameter { .. })));
}

#[test]
fn interference_limited_variants_note_ignored_noise() {
    let cfg = NetworkConfig { sigma_n2: 1.0, ..defaults() };
    let e = dl_cdf(&cfg, 1.0, DlCdf::IlIntegral, &spec()).unwrap();
    assert!(e.note.unwrap().contains("sigma_n2"));
    let il = NetworkConfig { sigma_n2: 0.0, ..cfg };
    assert!(dl_cdf(&il, 1.0, DlCdf::IlIntegral, &spec()).unwrap().note.is_none());
}

// Monte Carlo cross-checks at desk scale; the acceptance target repeats the
// headline ones with 10⁶ trials.

fn within(mc: f64, se: f64, an: f64, slack: f64) -> bool {
    (mc - an).abs() <= 3.0 * se + slack
}

#[test]
fn ul_case1_cdf_matches_simulation() {
    let cfg = NetworkConfig { n_u: 1, n_d: 4, sigma_n2: 0.0, sigma_aa2: 0.1, ..defaults() };
    let z = spec().z_grid;
    let mc = estimate_cdf(&cfg, Scheme::MrcMrt, &z, &McOptions::new(100_000, 11)).unwrap();
    for (i, &zi) in z.iter().enumerate() {
        let an = ul(&cfg, zi, UlCdf::Case1Quadrature);
        assert!(within(mc.ul[i], mc.se(an), an, 1e-3), "z={zi}: mc {} vs {an}", mc.ul[i]);
    }
}

#[test]
fn rus_quadrature_matches_simulation() {
    let cfg = NetworkConfig { n_u: 1, n_d: 2, selection: Selection::Rus, ..defaults() };
    let z = [0.05, 0.5, 5.0];
    let mc = estimate_cdf(&cfg, Scheme::MrcMrt, &z, &McOptions::new(100_000, 12)).unwrap();
    for (i, &zi) in z.iter().enumerate() {
        let u = ul(&cfg, zi, UlCdf::Case1Quadrature);
        let d = dl(&cfg, zi, DlCdf::Exact);
        assert!(within(mc.ul[i], mc.se(u), u, 1e-3), "ul z={zi}: {} vs {u}", mc.ul[i]);
        assert!(within(mc.dl[i], mc.se(d), d, 1e-3), "dl z={zi}: {} vs {d}", mc.dl[i]);
    }
}

#[test]
fn zf_variants_match_simulation() {
    let cfg = NetworkConfig { n_u: 3, n_d: 3, ..defaults() };
    let o = McOptions::new(60_000, 13);
    let mrczf = estimate_fd(&cfg, Scheme::MrcZf, &o).unwrap();
    let zfmrt = estimate_fd(&cfg, Scheme::ZfMrt, &o).unwrap();
    let s = spec();
    let a = ul_rate(&cfg, UlRate::MrcZf, &s).unwrap().value;
    assert!(within(mrczf.mean_rate_ul, mrczf.se_ul, a, 0.0), "{} vs {a}", mrczf.mean_rate_ul);
    let b = ul_rate(&cfg, UlRate::ZfMrt, &s).unwrap().value;
    assert!(within(zfmrt.mean_rate_ul, zfmrt.se_ul, b, 0.0), "{} vs {b}", zfmrt.mean_rate_ul);
    let c = dl_rate(&cfg, DlRate::Exact, &s).unwrap().value;
    assert!(within(zfmrt.mean_rate_dl, zfmrt.se_dl, c, 0.0), "{} vs {c}", zfmrt.mean_rate_dl);
}

#[test]
fn hd_expectation_matches_simulation() {
    let cfg = defaults();
    let o = McOptions::new(100_000, 14);
    for cond in [HdCondition::Ac, HdCondition::Rc] {
        let mc = estimate_hd(&cfg, cond, cfg.delta, &o).unwrap();
        let (u, d) = hd_rates(&cfg, cond, &spec()).unwrap();
        assert!(within(mc.mean_rate_dl, mc.se_dl, d, 0.0), "{cond:?} dl {} vs {d}", mc.mean_rate_dl);
        assert!(within(mc.mean_rate_ul, mc.se_ul, u, 0.0), "{cond:?} ul {} vs {u}", mc.mean_rate_ul);
    }
}

#[test]
fn large_array_matches_simulation() {
    let cfg = NetworkConfig { n_u: 16, n_d: 16, ..defaults() };
    let mc = estimate_large_array(&cfg, &McOptions::new(40_000, 15)).unwrap();
    let (u, d) = large_array_rates(&cfg, &spec()).unwrap();
    assert!(within(mc.mean_rate_ul, mc.se_ul, u, 0.0), "{} vs {u}", mc.mean_rate_ul);
    assert!(within(mc.mean_rate_dl, mc.se_dl, d, 0.0), "{} vs {d}", mc.mean_rate_dl);
}
