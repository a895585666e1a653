use approx::assert_relative_eq;
use cvqkd_core::skr::*;
use nalgebra::{Matrix2, Matrix4};
use proptest::prelude::*;

fn gamma(c: &CovarianceMatrix) -> Matrix4<f64> {
    let (v, w, z) = (c.v(), c.w(), c.z());
    Matrix4::new(
        v, 0.0, z, 0.0, //
        0.0, v, 0.0, -z, //
        z, 0.0, w, 0.0, //
        0.0, -z, 0.0, w,
    )
}

/// Symplectic spectrum from the eigenvalues `±iλ` of `Ωγ`.
fn oracle_symplectic(c: &CovarianceMatrix) -> (f64, f64) {
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    );
    let mut ims: Vec<f64> = (omega * gamma(c))
        .complex_eigenvalues()
        .iter()
        .map(|e| e.im.abs())
        .collect();
    ims.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (ims[0], ims[2])
}

fn oracle_g(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (x + 1.0) * (x + 1.0).log2() - x * x.log2()
    }
}

/// Holevo bound from the conditional covariance of Alice's mode after Bob's
/// measurement, computed with dense matrices.
fn oracle_holevo(c: &CovarianceMatrix, det: Detection) -> f64 {
    let g = gamma(c);
    let a: Matrix2<f64> = g.fixed_view::<2, 2>(0, 0).into();
    let b: Matrix2<f64> = g.fixed_view::<2, 2>(2, 2).into();
    let s: Matrix2<f64> = g.fixed_view::<2, 2>(0, 2).into();
    let cond = match det {
        Detection::Heterodyne => a - s * (b + Matrix2::identity()).try_inverse().unwrap() * s.transpose(),
        Detection::Homodyne => {
            // Moore-Penrose inverse of diag(b_xx, 0).
            let pinv = Matrix2::new(1.0 / b[(0, 0)], 0.0, 0.0, 0.0);
            a - s * pinv * s.transpose()
        }
    };
    let l3 = cond.determinant().sqrt();
    let (l1, l2) = oracle_symplectic(c);
    let h = |l: f64| oracle_g(((l - 1.0) / 2.0).max(0.0));
    h(l1) + h(l2) - h(l3)
}

#[test]
fn symplectic_eigenvalues_match_dense_oracle() {
    for &t in &[0.0, 0.01, 0.1, 0.37, 0.5, 0.9, 1.0] {
        for &xi in &[0.0, 0.01, 0.03, 0.1] {
            for &va in &[0.5, 2.0, 5.0, 20.0] {
                let c = build_covariance(va, t, xi).unwrap();
                let (l1, l2) = symplectic_eigenvalues(&c).unwrap();
                let (o1, o2) = oracle_symplectic(&c);
                assert_relative_eq!(l1, o1, max_relative = 1e-9);
                assert_relative_eq!(l2, o2, max_relative = 1e-9);
            }
        }
    }
}

#[test]
fn holevo_matches_conditional_covariance_oracle() {
    for det in [Detection::Heterodyne, Detection::Homodyne] {
        for &t in &[0.01, 0.1, 0.5, 0.99] {
            for &xi in &[0.01, 0.03, 0.1] {
                let c = build_covariance(5.0, t, xi).unwrap();
                let got = holevo_bound(&c, det).unwrap();
                let want = oracle_holevo(&c, det);
                assert!((got - want).abs() < 1e-7, "{det:?} t={t} xi={xi}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn g_function_matches_direct_formula() {
    for &x in &[0.0, 1e-6, 0.5, 1.0, 3.0, 100.0] {
        assert_relative_eq!(g_function(x).unwrap(), oracle_g(x), max_relative = 1e-14);
    }
}

#[test]
fn delta_n_term_by_term() {
    let sec = SecurityParams::default();
    let (d, eps_s, eps, n) = (5.0f64, 2e-10f64, 1e-9f64, 1e11f64);
    let rn = n.sqrt();
    let oracle = (d + 1.0).powi(2) / rn
        + 4.0 * (d + 1.0) * (2.0 / eps_s).log2().sqrt() / rn
        + 2.0 * (2.0 / (eps * eps * eps_s)).log2() / rn
        + 4.0 * eps_s * d / (eps * rn) / rn;
    assert_relative_eq!(delta_n_privacy(&sec), oracle, max_relative = 1e-13);
    assert!((delta_n_privacy(&sec) - 1.139e-3).abs() < 1e-5);
}

#[test]
fn skr_composes_its_parts() {
    let proto = ProtocolParams::default();
    let sec = SecurityParams::default();
    for &t in &[0.02, 0.1, 0.5, 0.9] {
        let r = skr_finite(&proto, &sec, t, None).unwrap();
        let snr = 5.0 * t / (2.0 + 0.03 * t);
        let s_db = 10.0 * snr.log10();
        let beta = beta_empirical(s_db, Reconciliation::Md).value;
        let fer = fer_empirical(s_db).value;
        let i_ab = (1.0 + snr).log2();
        let c = build_covariance(5.0, t, 0.03).unwrap();
        let expected =
            50e6 * ((1.0 - fer) * beta * i_ab - oracle_holevo(&c, Detection::Heterodyne) - delta_n_privacy(&sec));
        assert!((r.skr - expected).abs() < 1.0, "t={t}: {} vs {expected}", r.skr);
    }
}

#[test]
fn fer_and_beta_clamping_flags() {
    let f = fer_empirical(-40.0);
    assert!(f.clamped && f.value == 1.0 && f.raw > 1.0);
    let f = fer_empirical(0.0);
    assert!(f.clamped && f.value == 0.0 && f.raw < 0.0);
    let f = fer_empirical(-15.3);
    assert!(!f.clamped && f.value > 0.0 && f.value < 1.0);
    let b = beta_empirical(10.0, Reconciliation::Md);
    assert!(b.clamped && b.value == 0.0);
}

#[test]
fn skr_monotone_on_tenth_grid() {
    let sec = SecurityParams::default();
    for &beta in &[0.95, 1.0] {
        for va in 1..=8 {
            for &xi in &[0.0, 0.01, 0.05] {
                let proto = ProtocolParams {
                    modulation_variance: va as f64,
                    excess_noise: xi,
                    beta_mode: BetaMode::Fixed(beta),
                    ..Default::default()
                };
                let rates: Vec<f64> = (0..=10)
                    .map(|i| skr_finite(&proto, &sec, i as f64 / 10.0, None).unwrap().skr)
                    .collect();
                for w in rates.windows(2) {
                    assert!(w[1] >= w[0], "beta={beta} va={va} xi={xi}: {rates:?}");
                }
            }
        }
    }
}

#[test]
fn noisy_low_efficiency_rate_dips_below_dead_channel() {
    // With β = 0.9 and ξ = 0.05 Eve's information outgrows βI_AB at small T.
    let proto = ProtocolParams {
        modulation_variance: 6.0,
        excess_noise: 0.05,
        beta_mode: BetaMode::Fixed(0.9),
        ..Default::default()
    };
    let sec = SecurityParams::default();
    let at = |t| skr_finite(&proto, &sec, t, None).unwrap().skr;
    assert!(at(0.1) < at(0.0));
}

#[test]
fn frame_error_cliff_breaks_monotonicity_between_grid_points() {
    // Below the cliff every frame fails, so only the Holevo term grows with T.
    let proto = ProtocolParams {
        beta_mode: BetaMode::Fixed(0.95),
        ..Default::default()
    };
    let sec = SecurityParams::default();
    let at = |t| skr_finite(&proto, &sec, t, None).unwrap().skr;
    assert!(at(0.005) < at(0.0));
}

#[test]
fn physical_on_reference_grid() {
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        for va in 1..=8 {
            for &xi in &[0.0, 0.01, 0.05] {
                let c = build_covariance(va as f64, t, xi).unwrap();
                let (l1, l2) = symplectic_eigenvalues(&c).unwrap();
                assert!(l1 >= 1.0 - 1e-9 && l2 >= 1.0 - 1e-9);
                for det in [Detection::Heterodyne, Detection::Homodyne] {
                    let s = holevo_bound(&c, det).unwrap();
                    assert!(s >= -1e-9);
                    if i == 0 {
                        assert!(s.abs() <= 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn asymptotic_rate_bounded_by_mutual_information() {
    for &t in &[0.0, 0.1, 0.5, 1.0] {
        let c = build_covariance(5.0, t, 0.03).unwrap();
        let i_ab = mutual_information(snr_linear(5.0, t, 0.03).unwrap(), Detection::Heterodyne).unwrap();
        let s = holevo_bound(&c, Detection::Heterodyne).unwrap();
        for &beta in &[0.0, 0.5, 0.95, 1.0] {
            assert!(skr_asymptotic(beta, i_ab, s).unwrap() <= i_ab);
        }
    }
}

#[test]
fn delta_n_strictly_decreasing_by_decade() {
    let values: Vec<f64> = (6..=13)
        .map(|k| {
            delta_n_privacy(&SecurityParams {
                block_size: 10f64.powi(k),
                ..Default::default()
            })
        })
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn holevo_vanishes_without_channel() {
    for det in [Detection::Heterodyne, Detection::Homodyne] {
        for &xi in &[0.0, 0.03, 0.5] {
            let c = build_covariance(5.0, 0.0, xi).unwrap();
            assert!(holevo_bound(&c, det).unwrap().abs() < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn heterodyne_doubles_homodyne(snr in 0.0f64..1e3) {
        let het = mutual_information(snr, Detection::Heterodyne).unwrap();
        let hom = mutual_information(snr, Detection::Homodyne).unwrap();
        prop_assert_eq!(het, 2.0 * hom);
    }

    #[test]
    fn covariance_is_physical(va in 0.01f64..50.0, t in 0.0f64..=1.0, xi in 0.0f64..0.5) {
        let c = build_covariance(va, t, xi).unwrap();
        prop_assert!(c.v() >= 1.0 && c.w() >= 1.0);
        prop_assert!(c.determinant_block() >= 1.0 - PHYSICALITY_TOL);
    }

    #[test]
    fn holevo_is_nonnegative(va in 0.1f64..30.0, t in 0.0f64..=1.0, xi in 0.0f64..0.3, hom in any::<bool>()) {
        let det = if hom { Detection::Homodyne } else { Detection::Heterodyne };
        let c = build_covariance(va, t, xi).unwrap();
        prop_assert!(holevo_bound(&c, det).unwrap() >= -1e-9);
    }

    // Above the frame-error cliff (SNR ≈ −15.3 dB, T ≈ 0.012 here) the
    // frame error rate is zero and the rate only rises with T.
    #[test]
    fn skr_grows_with_transmittance(t1 in 0.02f64..=1.0, t2 in 0.02f64..=1.0, beta in 0.9f64..=1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let proto = ProtocolParams { beta_mode: BetaMode::Fixed(beta), ..Default::default() };
        let sec = SecurityParams::default();
        let a = skr_finite(&proto, &sec, lo, None).unwrap().skr;
        let b = skr_finite(&proto, &sec, hi, None).unwrap().skr;
        prop_assert!(b >= a - 1e-6 * a.abs().max(1.0), "T {lo} -> {a}, T {hi} -> {b}");
    }

    #[test]
    fn skr_never_beats_reconciled_information(t in 0.0f64..=1.0, beta in 0.0f64..=1.0, empirical in any::<bool>()) {
        let beta_mode = if empirical { BetaMode::Empirical } else { BetaMode::Fixed(beta) };
        let proto = ProtocolParams { beta_mode, ..Default::default() };
        let r = skr_finite(&proto, &SecurityParams::default(), t, None).unwrap();
        prop_assert!(r.skr <= proto.repetition_rate_hz * r.beta * r.mutual_info);
    }

    #[test]
    fn delta_n_shrinks_with_block_size(n1 in 1e6f64..1e14, n2 in 1e6f64..1e14) {
        let (lo, hi) = if n1 <= n2 { (n1, n2) } else { (n2, n1) };
        let at = |n| delta_n_privacy(&SecurityParams { block_size: n, ..Default::default() });
        prop_assert!(at(hi) <= at(lo));
    }

    #[test]
    fn fitted_quantities_stay_in_unit_interval(s in -60.0f64..40.0, mlc in any::<bool>(), signed in any::<bool>()) {
        let scheme = if mlc { Reconciliation::MlcMsd } else { Reconciliation::Md };
        let policy = if signed { NegativeBase::Signed } else { NegativeBase::Magnitude };
        let b = beta_empirical_with(s, scheme, policy);
        prop_assert!((0.0..=1.0).contains(&b.value));
        prop_assert_eq!(b.clamped, b.value != b.raw);
        let f = fer_empirical(s);
        prop_assert!((0.0..=1.0).contains(&f.value));
        prop_assert_eq!(f.clamped, f.value != f.raw);
    }
}
