use qecnoise::oracle::*;
use std::f64::consts::PI;

#[test]
fn examples() {
    let rows = dyson_norm_bound(1.0, &[0.0, PI, 0.1]).unwrap();
    assert_eq!((rows[0].exact_norm, rows[0].bound), (0.0, 0.0));
    assert!((rows[1].exact_norm - 2.0).abs() < 1e-15);
    assert_eq!(rows[1].bound, PI);
    assert!((rows[2].exact_norm - 0.099_958_338).abs() < 1e-9);
}

#[test]
fn identity_with_cosine_form() {
    for i in 0..200 {
        let x = i as f64 * 0.1;
        let r = dyson_norm_bound(1.0, &[x]).unwrap()[0];
        assert!((r.exact_norm - (2.0 * (1.0 - x.cos())).sqrt()).abs() < 1e-7);
    }
}

#[test]
fn partial_sums_converge_to_exponential() {
    let s = dyson_partial_sums(2.0, 1.5, 60).unwrap();
    assert!(s.windows(2).all(|w| w[1] >= w[0]));
    assert!((s.last().unwrap() / 3f64.exp() - 1.0).abs() < 1e-14);
}
