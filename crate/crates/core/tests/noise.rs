use qecnoise::noise::*;
use proptest::prelude::*;

fn temporal(delta: f64, z: f64) -> EnvironmentSpec {
    EnvironmentSpec::temporal(10.0, z, delta, 1.0)
}

#[test]
fn temporal_correlator_examples() {
    let env = EnvironmentSpec::temporal(100.0, 2.0, 1.0, 1.0);
    assert!((two_point_correlator(&env, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(two_point_correlator(&env, 1.0, 0.3).unwrap(), 0.0);
}

#[test]
fn short_times_are_clamped_to_cutoff() {
    // δ = z = 1, τ₀ = 1, Λ = 10: dt = 0.01 < 1/Λ evaluates at 0.1
    let env = EnvironmentSpec::temporal(10.0, 1.0, 1.0, 1.0);
    let c = two_point_correlator(&env, 0.0, 0.01).unwrap();
    assert!((c - 50.0).abs() < 1e-12);
    assert_eq!(c, two_point_correlator(&env, 0.0, 0.0).unwrap());
    // Away from the cutoff the unregularised law is recovered.
    let far = two_point_correlator(&env, 0.0, 3.0).unwrap();
    assert!((far - 0.5 / 9.0).abs() < 1e-15);
    assert!(far < c);
}

#[test]
fn space_time_kernel_is_bounded_by_half_at_contact() {
    let env = EnvironmentSpec {
        kernel: KernelFamily::PowerLawSpaceTime,
        spatial_dim: 1,
        tau0: 0.1,
        ..temporal(1.0, 1.0)
    };
    let xi0 = env.length_cutoff();
    assert!((xi0 - 0.1).abs() < 1e-15);
    let c = two_point_correlator(&env, 0.0, 0.0).unwrap();
    assert!((c - 0.5).abs() < 1e-15);
    let c2 = two_point_correlator(&env, 2.0 * xi0, 0.0).unwrap();
    assert!((c2 - 0.5 * 0.25).abs() < 1e-15);
}

#[test]
fn ohmic_kernel_ignores_scaling_fields() {
    let env = EnvironmentSpec {
        kernel: KernelFamily::OhmicSpinBoson,
        ..temporal(0.3, 5.0)
    };
    let c = two_point_correlator(&env, 0.0, 2.0).unwrap();
    assert!((c - 0.125).abs() < 1e-15);
}

#[test]
fn invalid_environment_rejected() {
    let mut env = temporal(1.0, 1.0);
    env.tau0 = 0.0;
    assert!(two_point_correlator(&env, 0.0, 1.0).is_err());
    env.tau0 = 1.0;
    env.cutoff_lambda = -1.0;
    assert!(hypercube_length(&env, 1.0).is_err());
}

#[test]
fn four_point_examples() {
    let env = EnvironmentSpec::temporal(100.0, 2.0, 1.0, 1.0);
    assert!((four_point_normal_ordered(&env, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(four_point_normal_ordered(&env, 1.0, 1.0).unwrap(), 0.0);
}

#[test]
fn hypercube_length_examples() {
    let mut env = temporal(1.0, 1.0);
    assert!((hypercube_length(&env, 1.0).unwrap() - 1.0).abs() < 1e-15);
    env.dyn_exponent = 2.0;
    assert!((hypercube_length(&env, 4.0).unwrap() - 2.0).abs() < 1e-15);
    env.dyn_exponent = 3.0;
    env.velocity = 2.0;
    // 16^{1/3}
    assert!((hypercube_length(&env, 8.0).unwrap() - 2.519_842_099_789_746).abs() < 1e-12);
    assert!(hypercube_length(&env, 0.0).is_err());
}

#[test]
fn effective_coupling_examples() {
    assert_eq!(effective_coupling(&CouplingSet::new(1.0, 0.0, 0.0).unwrap()), 1.0);
    assert_eq!(effective_coupling(&CouplingSet::new(3.0, 4.0, 0.0).unwrap()), 5.0);
    let c = CouplingSet::new(0.1, 0.1, 0.1).unwrap();
    assert!((effective_coupling(&c) - 0.173_205_080_756_887_7).abs() < 1e-15);
    assert!(CouplingSet::new(-0.1, 0.0, 0.0).is_err());
}

#[test]
fn spin_boson_examples() {
    assert_eq!(spin_boson_offdiagonal(0.1, 7.0, 0.0).unwrap(), 1.0);
    assert_eq!(spin_boson_offdiagonal(0.0, 7.0, 12.0).unwrap(), 1.0);
    let e = std::f64::consts::E;
    let v = spin_boson_offdiagonal(1.0, 1.0, e - 1.0).unwrap();
    assert!((v - (-1.0f64).exp()).abs() < 1e-15);
}

#[test]
fn multiqubit_examples() {
    let e = std::f64::consts::E;
    for bath in [BathTopology::Independent, BathTopology::Common] {
        assert_eq!(multiqubit_offdiagonal(1.0, 1.0, 5.0, 3, 3, bath).unwrap(), 1.0);
    }
    let ind = multiqubit_offdiagonal(1.0, 1.0, e - 1.0, 2, 0, BathTopology::Independent).unwrap();
    let com = multiqubit_offdiagonal(1.0, 1.0, e - 1.0, 2, 0, BathTopology::Common).unwrap();
    assert!((ind - (-2.0f64).exp()).abs() < 1e-15);
    assert!((com - (-4.0f64).exp()).abs() < 1e-15);
    // common / independent = e^{-(p-q)(p-q-1)}
    assert!((com / ind - (-2.0f64).exp()).abs() < 1e-15);
}

#[test]
fn environment_json_round_trip() {
    let env = EnvironmentSpec {
        kernel: KernelFamily::PowerLawSpaceTime,
        spatial_dim: 2,
        ..temporal(0.75, 1.5)
    };
    let text = env.to_json();
    assert!(text.contains("\"cutoff_lambda\""));
    assert!(text.contains("\"PowerLawSpaceTime\""));
    assert_eq!(EnvironmentSpec::from_json(&text).unwrap(), env);
    assert!(EnvironmentSpec::from_json("{\"cutoff_lambda\": 1}").is_err());
}

fn any_env() -> impl Strategy<Value = EnvironmentSpec> {
    (0.5f64..100.0, 0.2f64..3.0, 0.05f64..3.0, 0.01f64..5.0, 0.1f64..5.0, any::<bool>()).prop_map(
        |(cutoff, z, delta, tau0, v, spatial)| EnvironmentSpec {
            cutoff_lambda: cutoff,
            velocity: v,
            dyn_exponent: z,
            scaling_dim: delta,
            spatial_dim: if spatial { 2 } else { 0 },
            tau0,
            kernel: if spatial {
                KernelFamily::PowerLawSpaceTime
            } else {
                KernelFamily::PowerLawTemporal
            },
        },
    )
}

proptest! {
    #[test]
    fn correlator_symmetric_and_monotone(env in any_env(), dx in 0.0f64..10.0, dt in 0.0f64..10.0,
                                          gx in 0.0f64..5.0, gt in 0.0f64..5.0) {
        let c = two_point_correlator(&env, dx, dt).unwrap();
        prop_assert!(c.is_finite() && c >= 0.0);
        prop_assert_eq!(c, two_point_correlator(&env, -dx, -dt).unwrap());
        prop_assert!(two_point_correlator(&env, dx, dt + gt).unwrap() <= c);
        prop_assert!(two_point_correlator(&env, dx + gx, dt).unwrap() <= c);
    }

    #[test]
    fn wick_identity_holds_exactly(env in any_env(), dx in -5.0f64..5.0, dt in -5.0f64..5.0) {
        let c = two_point_correlator(&env, dx, dt).unwrap();
        prop_assert_eq!(four_point_normal_ordered(&env, dx, dt).unwrap(), 2.0 * c * c);
    }

    #[test]
    fn temporal_scaling(delta in 0.05f64..3.0, z in 0.2f64..3.0, dt in 1.0f64..100.0) {
        let env = EnvironmentSpec::temporal(10.0, z, delta, 1.0);
        let a = two_point_correlator(&env, 0.0, dt).unwrap();
        let b = two_point_correlator(&env, 0.0, 2.0 * dt).unwrap();
        let expected = 2f64.powf(-2.0 * delta / z);
        prop_assert!(((b / a) / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_bath_is_power_of_single(lambda in 0.0f64..2.0, cutoff in 0.1f64..50.0,
                                           t in 0.0f64..100.0, p in -6i64..6, q in -6i64..6) {
        let single = spin_boson_offdiagonal(lambda, cutoff, t).unwrap();
        let multi = multiqubit_offdiagonal(lambda, cutoff, t, p, q, BathTopology::Independent).unwrap();
        let expected = single.powi((p - q).abs() as i32);
        prop_assert!((multi - expected).abs() <= 1e-13 * expected.max(1e-300));
    }

    #[test]
    fn spin_boson_strictly_decreasing(lambda in 0.05f64..2.0, cutoff in 0.1f64..50.0,
                                      t in 0.0f64..50.0, dt in 0.01f64..10.0) {
        prop_assert!(spin_boson_offdiagonal(lambda, cutoff, t + dt).unwrap()
            < spin_boson_offdiagonal(lambda, cutoff, t).unwrap());
    }

    #[test]
    fn coupling_permutation_invariant(a in 0.0f64..5.0, b in 0.0f64..5.0, c in 0.0f64..5.0) {
        let base = effective_coupling(&CouplingSet::new(a, b, c).unwrap());
        for (x, y, z) in [(b, c, a), (c, a, b), (b, a, c), (a, c, b), (c, b, a)] {
            let other = effective_coupling(&CouplingSet::new(x, y, z).unwrap());
            prop_assert!((other - base).abs() <= 1e-15 * base.max(1.0));
        }
        prop_assert!(base >= a.max(b).max(c));
    }
}
