//! Brute-force double integrals used to check the closed forms.

use crate::error::{param, require_positive, Result};
use crate::histories::{four_point_exponent, QecSchedule};
use crate::noise::EnvironmentSpec;
use crate::quad::{integrate, QuadOptions};

/// Local error probability from a plain 2-D trapezoid rule on an
/// `(n+1) × (n+1)` grid over `[0, Δ]²`, and the Richardson combination
/// with the `n/2` sub-grid made of every second node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidLocalError {
    pub fine: f64,
    pub coarse: f64,
    pub richardson: f64,
}

pub fn trapezoid_local_error(env: &EnvironmentSpec, lambda_star: f64, delta: f64, n: usize) -> Result<TrapezoidLocalError> {
    env.validate()?;
    require_positive("delta", delta)?;
    if n < 2 || n % 2 != 0 {
        return Err(param("n", format!("grid intervals must be even and >= 2, got {n}")));
    }
    let h = delta / n as f64;
    let w = |i: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
    let (mut fine, mut coarse) = (0.0, 0.0);
    for i in 0..=n {
        let ti = i as f64 * h;
        let (mut row_fine, mut row_coarse) = (0.0, 0.0);
        for j in 0..=n {
            let k = env.temporal_factor(ti - j as f64 * h);
            row_fine += w(j) * k;
            if i % 2 == 0 && j % 2 == 0 {
                row_coarse += w(j) * k;
            }
        }
        fine += w(i) * row_fine;
        coarse += w(i) * row_coarse;
    }
    let scale = 0.25 * lambda_star * lambda_star;
    let fine = scale * fine * h * h;
    let coarse = scale * coarse * 4.0 * h * h;
    Ok(TrapezoidLocalError {
        fine,
        coarse,
        richardson: (4.0 * fine - coarse) / 3.0,
    })
}

/// Excess `correction − 1` of the flawless probability from nested adaptive
/// quadrature of `(λ*Δ/2)⁴/(1−ε)² ∫₀^N∫₀^N dx dy ½ (τ₀/(Δ|x−y|))^a`, the
/// unregularised four-point function in units of the cycle period.
/// Converges for `a = 4δ/z < 1`.
pub fn flawless_excess_quadrature(env: &EnvironmentSpec, schedule: &QecSchedule, lambda_star: f64, epsilon: f64) -> Result<f64> {
    env.validate()?;
    schedule.validate()?;
    let a = four_point_exponent(env);
    if a >= 1.0 {
        return Err(param("scaling_dim", format!("the correction integral diverges for 4δ/z = {a} >= 1")));
    }
    let n = schedule.n_cycles as f64;
    let opts = QuadOptions {
        rel_tol: 1e-9,
        max_intervals: 5000,
        ..QuadOptions::default()
    };
    let kernel = |u: f64| 0.5 * u.abs().powf(-a);
    let inner = |x: f64| -> f64 {
        integrate(kernel, -x, n - x, &[0.0], opts)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let outer = integrate(inner, 0.0, n, &[], opts)?;
    Ok((0.5 * lambda_star * schedule.delta).powi(4) / (1.0 - epsilon).powi(2)
        * (env.tau0 / schedule.delta).powf(a)
        * outer.value)
}
