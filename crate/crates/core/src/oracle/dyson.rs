//! Norm bound on the error part of the evolution for a bounded perturbation.
//!
//! For a constant `V` with top eigenvalue `Λ_V`, the error operator has norm
//! `sqrt(2(1 − cos Λ_V t)) = 2|sin(Λ_V t/2)|`, bounded by `Λ_V t`.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DysonRow {
    pub t: f64,
    pub exact_norm: f64,
    pub bound: f64,
}

pub fn dyson_norm_bound(max_eigenvalue: f64, t_grid: &[f64]) -> Result<Vec<DysonRow>> {
    require_positive("max_eigenvalue", max_eigenvalue)?;
    t_grid
        .iter()
        .map(|&t| {
            require_non_negative("t", t)?;
            let x = max_eigenvalue * t;
            Ok(DysonRow {
                t,
                exact_norm: 2.0 * (0.5 * x).sin().abs(),
                bound: x,
            })
        })
        .collect()
}

/// Partial sums `Σ_{n≤k} (Λ_V t)^n / n!` of the term-wise norm bound of the
/// Dyson series; they increase to `e^{Λ_V t}`.
pub fn dyson_partial_sums(max_eigenvalue: f64, t: f64, terms: usize) -> Result<Vec<f64>> {
    require_positive("max_eigenvalue", max_eigenvalue)?;
    require_non_negative("t", t)?;
    let x = max_eigenvalue * t;
    let mut term = 1.0;
    let mut sum = 0.0;
    Ok((0..terms)
        .map(|n| {
            if n > 0 {
                term *= x / n as f64;
            }
            sum += term;
            sum
        })
        .collect())
}
