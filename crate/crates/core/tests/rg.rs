use qecnoise::Error;
use qecnoise::rg::*;
use proptest::prelude::*;

#[test]
fn beta_examples() {
    let k2 = BetaFunction::kondo(2).unwrap();
    assert_eq!(beta(&k2, 1.0), 0.0);
    assert_eq!(k2.fixed_point(), Some(1.0));
    assert_eq!(beta(&BetaFunction::QuantumFrustrated, 0.0), 0.0);
    let k1 = BetaFunction::kondo(1).unwrap();
    assert!((beta(&k1, 0.1) - 0.0095).abs() < 1e-16);
    assert!(BetaFunction::kondo(0).is_err());
}

#[test]
fn kondo_fixed_point_is_root_of_beta() {
    for k in 1..=8 {
        let spec = BetaFunction::kondo(k).unwrap();
        // bisection on β over (0.5·2/k, 1.5·2/k), independent of fixed_point()
        let (mut lo, mut hi) = (1.0 / k as f64, 3.0 / k as f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if beta(&spec, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - spec.fixed_point().unwrap()).abs() < 1e-14);
    }
}

#[test]
fn free_fixed_point_does_not_flow() {
    let t = integrate_flow(&BetaFunction::QuantumFrustrated, 0.0, 7.0, StepControl::default()).unwrap();
    assert_eq!(t.lambda_star, 0.0);
    assert!(!t.diverged);
}

#[test]
fn leading_order_kondo_matches_pole_form() {
    let t = integrate_flow(&BetaFunction::KondoLeadingOrder, 0.1, 2.0, StepControl::default()).unwrap();
    assert!((t.lambda_star / 0.125 - 1.0).abs() < 1e-8);
    assert_eq!(t.samples.first().unwrap().lambda, 0.1);
    assert_eq!(t.samples.first().unwrap().ell, 0.0);
    assert_eq!(t.samples.last().unwrap().ell, 2.0);
}

#[test]
fn frustrated_flow_matches_exact_solution() {
    let t = integrate_flow(&BetaFunction::QuantumFrustrated, 0.5, 4.0, StepControl::default()).unwrap();
    let exact = frustrated_exact_solution(0.5, 4.0);
    assert!((exact - 0.5 / 2f64.sqrt()).abs() < 1e-15);
    assert!((t.lambda_star / exact - 1.0).abs() < 1e-8, "{} vs {exact}", t.lambda_star);
    // The printed closed form decays twice as fast in ℓ.
    let printed = closed_form_lambda_star(&BetaFunction::QuantumFrustrated, 0.5, 4.0).unwrap();
    assert!((printed.lambda_star - 0.288_675_134_594_812_9).abs() < 1e-15);
    assert!((printed.lambda_star - frustrated_exact_solution(0.5, 8.0)).abs() < 1e-15);
}

#[test]
fn kondo_strong_coupling_diverges() {
    let t = integrate_flow(&BetaFunction::KondoLeadingOrder, 0.5, 10.0, StepControl::default()).unwrap();
    assert!(t.diverged);
    assert!(t.samples.last().unwrap().ell < 10.0);
    assert!(t.lambda_star > DIVERGENCE_GUARD);
}

#[test]
fn unreachable_tolerance_reports_last_state() {
    let control = StepControl {
        rel_tol: 1e-14,
        abs_tol: 0.0,
        min_step: 0.05,
        ..StepControl::default()
    };
    let err = integrate_flow(&BetaFunction::kondo(1).unwrap(), 0.3, 5.0, control).unwrap_err();
    match err {
        Error::Integration { ell, lambda, .. } => {
            assert!(ell >= 0.0 && ell < 5.0);
            assert!(lambda >= 0.3);
        }
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn closed_form_examples() {
    let k = BetaFunction::kondo(1).unwrap();
    assert_eq!(closed_form_lambda_star(&k, 0.1, 0.0).unwrap().lambda_star, 0.1);
    let f = closed_form_lambda_star(&BetaFunction::QuantumFrustrated, 2.0, 10.0).unwrap();
    // 1 + 2·2²·10 = 81
    assert!((f.lambda_star - 2.0 / 9.0).abs() < 1e-15);
    assert!(matches!(
        closed_form_lambda_star(&k, 0.5, 2.0),
        Err(Error::StrongCoupling(_))
    ));
    // denominator 0.05 is below the validity margin
    let near = closed_form_lambda_star(&k, 0.5, 1.9).unwrap();
    assert!(!near.valid);
}

#[test]
fn csv_export() {
    let t = integrate_flow(&BetaFunction::QuantumFrustrated, 0.5, 1.0, StepControl::default()).unwrap();
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("ell,lambda"));
    assert_eq!(lines.count(), t.samples.len());
}

#[test]
fn log_scale_requires_cycle_longer_than_cutoff() {
    assert!((log_scale(100.0, 1.0).unwrap() - 100f64.ln()).abs() < 1e-15);
    assert!(log_scale(1.0, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frustrated_flow_monotone(lambda0 in 0.01f64..3.0, ell in 0.1f64..10.0) {
        let t = integrate_flow(&BetaFunction::QuantumFrustrated, lambda0, ell, StepControl::default()).unwrap();
        for w in t.samples.windows(2) {
            prop_assert!(w[1].ell > w[0].ell);
            prop_assert!(w[1].lambda <= w[0].lambda);
        }
    }

    #[test]
    fn kondo_approaches_fixed_point_from_below(k in 1u32..6, frac in 0.05f64..0.9, ell in 1.0f64..30.0) {
        let spec = BetaFunction::kondo(k).unwrap();
        let fp = spec.fixed_point().unwrap();
        let t = integrate_flow(&spec, frac * fp, ell, StepControl::default()).unwrap();
        for w in t.samples.windows(2) {
            // rounding jitter once the fixed point is reached
            prop_assert!(w[1].lambda >= w[0].lambda - 4.0 * f64::EPSILON * fp);
            prop_assert!(w[1].lambda <= fp * (1.0 + 1e-12));
        }
    }

    #[test]
    fn trajectories_are_deterministic(lambda0 in 0.0f64..1.0, ell in 0.0f64..8.0) {
        let spec = BetaFunction::kondo(3).unwrap();
        let a = integrate_flow(&spec, lambda0, ell, StepControl::default()).unwrap();
        let b = integrate_flow(&spec, lambda0, ell, StepControl::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}
