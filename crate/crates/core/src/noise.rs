//! Environment correlation kernels and the exactly solvable spin-boson decay laws.
//!
//! All correlators are the cutoff-regularised asymptotic power laws: time
//! separations are clamped to `1/Λ` and distances to `ξ₀ = (v/Λ)^{1/z}`, and
//! every kernel carries the overall factor ½.

use serde::{Deserialize, Serialize};

use crate::error::{param, require_non_negative, require_positive, Result};

/// Family of the environment two-point function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// `½ (τ₀/|t|)^{2δ/z} δ_{x,y}`: no spatial correlations.
    PowerLawTemporal,
    /// Separable `½ (τ₀/|t|)^{2δ/z} (ξ₀/|x|)^{2δ}`.
    PowerLawSpaceTime,
    /// Ohmic bath (`δ = z = 1`): `½ (τ₀/|t|)²`, one independent bath per qubit.
    OhmicSpinBoson,
}

/// The bath seen by the qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    /// Ultraviolet cutoff Λ (1/time).
    pub cutoff_lambda: f64,
    /// Excitation velocity v (length^z / time).
    pub velocity: f64,
    /// Dynamical exponent z.
    pub dyn_exponent: f64,
    /// Scaling dimension δ of the environment operator.
    pub scaling_dim: f64,
    /// Spatial dimension D of the qubit array.
    pub spatial_dim: u32,
    /// Time constant τ₀ of the correlator.
    pub tau0: f64,
    pub kernel: KernelFamily,
}

impl EnvironmentSpec {
    /// Purely temporal power-law bath (`D = 0`, `v = 1`).
    pub fn temporal(cutoff_lambda: f64, dyn_exponent: f64, scaling_dim: f64, tau0: f64) -> Self {
        Self {
            cutoff_lambda,
            velocity: 1.0,
            dyn_exponent,
            scaling_dim,
            spatial_dim: 0,
            tau0,
            kernel: KernelFamily::PowerLawTemporal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("cutoff_lambda", self.cutoff_lambda)?;
        require_positive("velocity", self.velocity)?;
        require_positive("dyn_exponent", self.dyn_exponent)?;
        require_positive("scaling_dim", self.scaling_dim)?;
        require_positive("tau0", self.tau0)?;
        Ok(())
    }

    /// Exponent `2δ/z` of the temporal decay (fixed to 2 for the ohmic bath).
    pub fn temporal_exponent(&self) -> f64 {
        match self.kernel {
            KernelFamily::OhmicSpinBoson => 2.0,
            _ => 2.0 * self.scaling_dim / self.dyn_exponent,
        }
    }

    /// Short-time cutoff `1/Λ`.
    pub fn time_cutoff(&self) -> f64 {
        1.0 / self.cutoff_lambda
    }

    /// Short-distance cutoff `ξ₀ = (v/Λ)^{1/z}`.
    pub fn length_cutoff(&self) -> f64 {
        (self.velocity / self.cutoff_lambda).powf(1.0 / self.dyn_exponent)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("EnvironmentSpec serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: Self = serde_json::from_str(text)
            .map_err(|e| param("environment", format!("malformed JSON: {e}")))?;
        env.validate()?;
        Ok(env)
    }

    /// Temporal factor `½ (τ₀ / max(|dt|, 1/Λ))^{2δ/z}` without validation.
    pub(crate) fn temporal_factor(&self, dt: f64) -> f64 {
        let lag = dt.abs().max(self.time_cutoff());
        0.5 * (self.tau0 / lag).powf(self.temporal_exponent())
    }
}

/// Per-axis coupling constants of the qubit-environment interaction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CouplingSet {
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub lambda_z: f64,
}

impl CouplingSet {
    pub fn new(lambda_x: f64, lambda_y: f64, lambda_z: f64) -> Result<Self> {
        let c = Self {
            lambda_x,
            lambda_y,
            lambda_z,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        require_non_negative("lambda_x", self.lambda_x)?;
        require_non_negative("lambda_y", self.lambda_y)?;
        require_non_negative("lambda_z", self.lambda_z)?;
        Ok(())
    }
}

/// Effective scalar coupling `λ = sqrt(λx² + λy² + λz²)`.
pub fn effective_coupling(c: &CouplingSet) -> f64 {
    c.lambda_x.hypot(c.lambda_y).hypot(c.lambda_z)
}

/// Regularised two-point function `⟨f(x, t) f(x + dx, t + dt)⟩`.
pub fn two_point_correlator(env: &EnvironmentSpec, dx: f64, dt: f64) -> Result<f64> {
    env.validate()?;
    if !dx.is_finite() || !dt.is_finite() {
        return Err(param("separation", format!("non-finite (dx = {dx}, dt = {dt})")));
    }
    let temporal = env.temporal_factor(dt);
    Ok(match env.kernel {
        KernelFamily::PowerLawTemporal | KernelFamily::OhmicSpinBoson => {
            if dx == 0.0 {
                temporal
            } else {
                0.0
            }
        }
        KernelFamily::PowerLawSpaceTime => {
            let xi0 = env.length_cutoff();
            let dist = dx.abs().max(xi0);
            temporal * (xi0 / dist).powf(2.0 * env.scaling_dim)
        }
    })
}

/// Normal-ordered four-point function `⟨:f²: :f²:⟩`; by Wick's theorem
/// this is twice the squared two-point function.
pub fn four_point_normal_ordered(env: &EnvironmentSpec, dx: f64, dt: f64) -> Result<f64> {
    let c = two_point_correlator(env, dx, dt)?;
    Ok(2.0 * c * c)
}

/// Minimum qubit spacing `ξ = (v Δ)^{1/z}` that decorrelates qubits within one cycle.
pub fn hypercube_length(env: &EnvironmentSpec, delta_qec: f64) -> Result<f64> {
    env.validate()?;
    require_positive("delta_qec", delta_qec)?;
    Ok((env.velocity * delta_qec).powf(1.0 / env.dyn_exponent))
}

/// Off-diagonal decay `(1 + Λt)^{-λ²}` of a single qubit in an ohmic bath.
pub fn spin_boson_offdiagonal(lambda: f64, cutoff_lambda: f64, t: f64) -> Result<f64> {
    require_non_negative("lambda", lambda)?;
    require_positive("cutoff_lambda", cutoff_lambda)?;
    require_non_negative("t", t)?;
    Ok((-lambda * lambda * (cutoff_lambda * t).ln_1p()).exp())
}

/// How several qubits share the ohmic environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BathTopology {
    /// One bath per qubit: decay exponent linear in the magnetisation difference.
    Independent,
    /// All qubits within `1/Λ` of each other: exponent quadratic in it.
    Common,
}

/// Decay of `ρ_{p,q}` between basis states with total magnetisations `p`, `q`.
pub fn multiqubit_offdiagonal(
    lambda: f64,
    cutoff_lambda: f64,
    t: f64,
    p: i64,
    q: i64,
    bath: BathTopology,
) -> Result<f64> {
    require_non_negative("lambda", lambda)?;
    require_positive("cutoff_lambda", cutoff_lambda)?;
    require_non_negative("t", t)?;
    let diff = (p - q).unsigned_abs() as f64;
    let weight = match bath {
        BathTopology::Independent => diff,
        BathTopology::Common => diff * diff,
    };
    Ok((-lambda * lambda * weight * (cutoff_lambda * t).ln_1p()).exp())
}
