//! Renormalisation-group flow of the qubit-environment coupling from the
//! bare cutoff `Λ` down to the QEC frequency `1/Δ`.
//!
//! The log-scale `ℓ` runs from 0 to `ln(ΛΔ)`. The ODE integrator is the
//! ground truth; the closed forms are kept for comparison.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{param, require_non_negative, require_positive, Error, Result};

/// Coupling above which the flow is treated as having left the perturbative regime.
pub const DIVERGENCE_GUARD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaFunction {
    /// `dλ/dℓ = λ² − (k/2) λ³`.
    KondoKChannel { channels: u32 },
    /// `dλ/dℓ = λ²`, the `k → 0` limit of the Kondo flow.
    KondoLeadingOrder,
    /// `dλ/dℓ = −λ³/2` (asymptotically free).
    QuantumFrustrated,
}

impl BetaFunction {
    pub fn kondo(channels: u32) -> Result<Self> {
        let spec = Self::KondoKChannel { channels };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::KondoKChannel { channels: 0 } => Err(param(
                "channels_k",
                "the k-channel Kondo flow needs k >= 1 (use KondoLeadingOrder for k -> 0)",
            )),
            _ => Ok(()),
        }
    }

    /// Non-trivial fixed point, when one exists.
    pub fn fixed_point(&self) -> Option<f64> {
        match *self {
            Self::KondoKChannel { channels } if channels > 0 => Some(2.0 / channels as f64),
            _ => None,
        }
    }
}

/// Right-hand side `dλ/dℓ`.
pub fn beta(spec: &BetaFunction, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    match *spec {
        BetaFunction::KondoKChannel { channels } => l2 - 0.5 * channels as f64 * l2 * lambda,
        BetaFunction::KondoLeadingOrder => l2,
        BetaFunction::QuantumFrustrated => -0.5 * l2 * lambda,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub ell: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgTrajectory {
    pub samples: Vec<FlowSample>,
    /// Running coupling at the last sample (at `ell_max` unless diverged).
    pub lambda_star: f64,
    /// Integration stopped at the divergence guard before reaching `ell_max`.
    pub diverged: bool,
}

impl RgTrajectory {
    /// CSV with header `ell,lambda`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,lambda\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{}", crate::fmt_f64(s.ell), crate::fmt_f64(s.lambda));
        }
        out
    }
}

/// Step-size control for [`integrate_flow`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Smallest admissible step before the integrator gives up.
    pub min_step: f64,
    /// Largest step; keeps the explicit scheme stable near attractive fixed points.
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            min_step: 1e-12,
            max_step: 0.5,
        }
    }
}

// Dormand–Prince 5(4) tableau. The flow is autonomous, so the nodes are not needed.
const A: [[f64; 5]; 5] = [
    [0.2, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One embedded step; returns the 5th-order value and the error estimate.
fn dopri_step(spec: &BetaFunction, y: f64, h: f64) -> (f64, f64) {
    let mut k = [0.0; 7];
    k[0] = beta(spec, y);
    for s in 1..6 {
        let incr: f64 = A[s - 1][..s].iter().zip(&k[..s]).map(|(a, k)| a * k).sum();
        k[s] = beta(spec, y + h * incr);
    }
    let y5 = y + h * B5[..6].iter().zip(&k[..6]).map(|(b, k)| b * k).sum::<f64>();
    k[6] = beta(spec, y5);
    let y4 = y + h * B4.iter().zip(&k).map(|(b, k)| b * k).sum::<f64>();
    (y5, (y5 - y4).abs())
}

/// Integrates `dλ/dℓ = β(λ)` from `ℓ = 0` to `ell_max`.
pub fn integrate_flow(
    spec: &BetaFunction,
    lambda0: f64,
    ell_max: f64,
    control: StepControl,
) -> Result<RgTrajectory> {
    spec.validate()?;
    require_non_negative("lambda0", lambda0)?;
    require_non_negative("ell_max", ell_max)?;
    require_positive("rel_tol", control.rel_tol)?;

    let mut samples = vec![FlowSample {
        ell: 0.0,
        lambda: lambda0,
    }];
    let mut ell = 0.0;
    let mut lambda = lambda0;
    let mut h = (ell_max * 1e-3).clamp(1e-6, 1e-2).max(control.min_step);

    while ell < ell_max {
        if lambda > DIVERGENCE_GUARD {
            return Ok(RgTrajectory {
                samples,
                lambda_star: lambda,
                diverged: true,
            });
        }
        let last = ell_max - ell <= h;
        let step = if last { ell_max - ell } else { h };
        let (next, err) = dopri_step(spec, lambda, step);
        let scale = control.abs_tol + control.rel_tol * lambda.abs().max(next.abs());
        let ratio = err / scale;
        if !next.is_finite() {
            h *= 0.2;
        } else if ratio <= 1.0 {
            ell = if last { ell_max } else { ell + step };
            lambda = next;
            samples.push(FlowSample { ell, lambda });
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h = (step * grow).min(control.max_step);
        } else {
            h = step * (0.9 * ratio.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < control.min_step && ell < ell_max {
            return Err(Error::Integration {
                ell,
                lambda,
                reason: format!("step size fell below {:e}", control.min_step),
            });
        }
    }

    Ok(RgTrajectory {
        diverged: lambda > DIVERGENCE_GUARD,
        lambda_star: lambda,
        samples,
    })
}

/// Closed-form running coupling with a validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub lambda_star: f64,
    /// False when the Kondo denominator `1 − λ0 ℓ` has dropped to 0.1 or below.
    pub valid: bool,
}

/// `λ0/(1 − λ0 ℓ)` for the Kondo family (exact only for the pure λ² flow) and
/// `λ0/sqrt(1 + 2 λ0² ℓ)` for the frustrated flow.
///
/// The frustrated form is the exact solution of `dλ/dℓ = −λ³`, not of
/// `−λ³/2`; see [`frustrated_exact_solution`] for the latter.
pub fn closed_form_lambda_star(spec: &BetaFunction, lambda0: f64, ell: f64) -> Result<ClosedForm> {
    spec.validate()?;
    require_non_negative("lambda0", lambda0)?;
    require_non_negative("ell", ell)?;
    match spec {
        BetaFunction::QuantumFrustrated => Ok(ClosedForm {
            lambda_star: lambda0 / (1.0 + 2.0 * lambda0 * lambda0 * ell).sqrt(),
            valid: true,
        }),
        BetaFunction::KondoKChannel { .. } | BetaFunction::KondoLeadingOrder => {
            let denom = 1.0 - lambda0 * ell;
            if denom <= 0.0 {
                return Err(Error::StrongCoupling(format!(
                    "Kondo pole reached: lambda0 * ell = {} >= 1",
                    lambda0 * ell
                )));
            }
            Ok(ClosedForm {
                lambda_star: lambda0 / denom,
                valid: denom > 0.1,
            })
        }
    }
}

/// Exact solution `λ0/sqrt(1 + λ0² ℓ)` of `dλ/dℓ = −λ³/2`.
pub fn frustrated_exact_solution(lambda0: f64, ell: f64) -> f64 {
    lambda0 / (1.0 + lambda0 * lambda0 * ell).sqrt()
}

/// `ℓ = ln(ΛΔ)` for a cutoff and a QEC period; requires `ΛΔ ≥ 1`.
pub fn log_scale(cutoff_lambda: f64, delta: f64) -> Result<f64> {
    require_positive("cutoff_lambda", cutoff_lambda)?;
    require_positive("delta", delta)?;
    let product = cutoff_lambda * delta;
    if product < 1.0 {
        return Err(param("delta", format!("cycle shorter than cutoff time (Λ·Δ = {product})")));
    }
    Ok(product.ln())
}
