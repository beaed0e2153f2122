//! Dimensional criterion `D + z − 2δ` and phase-diagram scans.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Half-width of the marginal band around a vanishing exponent.
pub const MARGINAL_BAND: f64 = 1e-12;

/// Upper critical (space-time) dimension of the λφ⁴ description.
pub const UPPER_CRITICAL_DIMENSION: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub spatial_dim: f64,
    pub dyn_exponent: f64,
    pub scaling_dim: f64,
}

impl PhasePoint {
    /// Accepts the closed boundary `z = 0`, `δ = 0` so scans can include it.
    pub fn new(spatial_dim: f64, dyn_exponent: f64, scaling_dim: f64) -> Result<Self> {
        for (name, v) in [("D", spatial_dim), ("z", dyn_exponent), ("delta", scaling_dim)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self {
            spatial_dim,
            dyn_exponent,
            scaling_dim,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseLabel {
    StochasticThresholdHolds,
    Marginal,
    CorrelationDominated,
}

impl PhaseLabel {
    pub fn from_exponent(exponent: f64) -> Self {
        if exponent.abs() <= MARGINAL_BAND {
            Self::Marginal
        } else if exponent < 0.0 {
            Self::StochasticThresholdHolds
        } else {
            Self::CorrelationDominated
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::StochasticThresholdHolds => "stochastic_threshold_holds",
            Self::Marginal => "marginal",
            Self::CorrelationDominated => "correlation_dominated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseClass {
    pub label: PhaseLabel,
    pub exponent: f64,
}

impl PhaseClass {
    fn from_exponent(exponent: f64) -> Self {
        Self {
            label: PhaseLabel::from_exponent(exponent),
            exponent,
        }
    }
}

/// With QEC: exponent `D + z − 2δ`.
pub fn classify_qec(point: &PhasePoint) -> PhaseClass {
    PhaseClass::from_exponent(point.spatial_dim + point.dyn_exponent - 2.0 * point.scaling_dim)
}

/// Without QEC: exponent `D + z − δ`.
pub fn classify_unprotected(point: &PhasePoint) -> PhaseClass {
    PhaseClass::from_exponent(point.spatial_dim + point.dyn_exponent - point.scaling_dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relevance {
    Relevant,
    Marginal,
    Irrelevant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi4Scaling {
    /// Scaling exponent of the λφ⁴ coupling.
    pub exponent: f64,
    pub relevance: Relevance,
}

fn relevance(exponent: f64) -> Relevance {
    if exponent.abs() <= MARGINAL_BAND {
        Relevance::Marginal
    } else if exponent > 0.0 {
        Relevance::Relevant
    } else {
        Relevance::Irrelevant
    }
}

/// `λ → λ b^{D+1−2ν}`.
pub fn phi4_relevance(spatial_dim: f64, nu: f64) -> Phi4Scaling {
    let exponent = spatial_dim + 1.0 - 2.0 * nu;
    Phi4Scaling {
        exponent,
        relevance: relevance(exponent),
    }
}

/// Scale invariance fixes `ν = D − 1`, leaving the exponent `3 − D`; it
/// vanishes at `D + 1 = ` [`UPPER_CRITICAL_DIMENSION`].
pub fn phi4_self_consistent(spatial_dim: f64) -> Phi4Scaling {
    let exponent = 3.0 - spatial_dim;
    Phi4Scaling {
        exponent,
        relevance: relevance(exponent),
    }
}

/// Evenly spaced grid axis; a single point requires `min == max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(param("range", format!("invalid range [{min}, {max}]")));
        }
        if points == 0 || (points == 1 && min != max) {
            return Err(param("resolution", format!("{points} points cannot span [{min}, {max}]")));
        }
        Ok(Self { min, max, points })
    }

    pub fn point(value: f64) -> Self {
        Self {
            min: value,
            max: value,
            points: 1,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            self.min
        } else if i + 1 == self.points {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    pub fn spacing(&self) -> f64 {
        if self.points < 2 {
            0.0
        } else {
            (self.max - self.min) / (self.points - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    #[serde(rename = "D")]
    pub spatial_dim: f64,
    #[serde(rename = "z")]
    pub dyn_exponent: f64,
    #[serde(rename = "delta")]
    pub scaling_dim: f64,
    pub exponent: f64,
    pub label: PhaseLabel,
}

/// Classifies every grid point; rows are ordered D-major, then z, then δ.
pub fn scan_grid(d_axis: &GridAxis, z_axis: &GridAxis, delta_axis: &GridAxis) -> Result<Vec<PhaseRow>> {
    for axis in [d_axis, z_axis, delta_axis] {
        GridAxis::new(axis.min, axis.max, axis.points)?;
    }
    let blocks: Vec<Vec<PhaseRow>> = (0..d_axis.points)
        .into_par_iter()
        .map(|i| {
            let d = d_axis.value(i);
            let mut rows = Vec::with_capacity(z_axis.points * delta_axis.points);
            for z in z_axis.values() {
                for delta in delta_axis.values() {
                    rows.push(row(d, z, delta)?);
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(blocks.concat())
}

/// Scan over the combination `D + z` (reported as `D = 0`, `z = D + z`) and δ.
pub fn scan_dz(dz_axis: &GridAxis, delta_axis: &GridAxis) -> Result<Vec<PhaseRow>> {
    scan_grid(&GridAxis::point(0.0), dz_axis, delta_axis)
}

fn row(d: f64, z: f64, delta: f64) -> Result<PhaseRow> {
    let p = PhasePoint::new(d, z, delta)?;
    let c = classify_qec(&p);
    Ok(PhaseRow {
        spatial_dim: d,
        dyn_exponent: z,
        scaling_dim: delta,
        exponent: c.exponent,
        label: c.label,
    })
}

/// Locates the δ at which the QEC label leaves `CorrelationDominated` by
/// bisection on the classifier alone.
pub fn boundary_by_bisection(spatial_dim: f64, dyn_exponent: f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let label = |delta: f64| -> Result<PhaseLabel> {
        Ok(classify_qec(&PhasePoint::new(spatial_dim, dyn_exponent, delta)?).label)
    };
    if label(lo)? != PhaseLabel::CorrelationDominated || label(hi)? != PhaseLabel::StochasticThresholdHolds {
        return Err(param("range", format!("[{lo}, {hi}] does not bracket the phase boundary")));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if label(mid)? == PhaseLabel::CorrelationDominated {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// CSV with header `D,z,delta,exponent,label`.
pub fn rows_to_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str("D,z,delta,exponent,label\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            crate::fmt_f64(r.spatial_dim),
            crate::fmt_f64(r.dyn_exponent),
            crate::fmt_f64(r.scaling_dim),
            crate::fmt_f64(r.exponent),
            r.label.as_str()
        );
    }
    out
}
