//! Long-time statistics of QEC under correlated noise.
//!
//! Time integrals are written in units of the cycle period: `x = t/Δ`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code3::LogicalState;
use crate::error::{param, require_non_negative, require_positive, Error, Result};
use crate::noise::{four_point_normal_ordered, hypercube_length, EnvironmentSpec};
use crate::quad::{integrate, QuadOptions};
use crate::stats::{chunks, trial_rng};

/// `|z − 2δ|/z` below this selects the marginal branch.
pub const MARGINAL_TOL: f64 = 1e-9;
/// `|4δ/z − 1|` below this makes the generic branch singular.
pub const SINGULAR_TOL: f64 = 1e-9;

/// QEC cycle period, number of cycles and number of logical qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QecSchedule {
    pub delta: f64,
    pub n_cycles: u64,
    pub n_logical: u32,
}

impl QecSchedule {
    pub fn new(delta: f64, n_cycles: u64, n_logical: u32) -> Result<Self> {
        let s = Self {
            delta,
            n_cycles,
            n_logical,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("delta", self.delta)?;
        if self.n_cycles == 0 {
            return Err(param("n_cycles", "must be >= 1"));
        }
        if self.n_logical == 0 {
            return Err(param("n_logical", "must be >= 1"));
        }
        Ok(())
    }

    /// Requires `Λ·Δ ≥ 1`: a cycle must not be shorter than the cutoff time.
    pub fn check_cutoff(&self, env: &EnvironmentSpec) -> Result<()> {
        let product = env.cutoff_lambda * self.delta;
        if product < 1.0 {
            return Err(param("delta", format!("cycle shorter than cutoff time (Λ·Δ = {product})")));
        }
        Ok(())
    }
}

/// Outcome of one cycle in the stochastic picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CycleOutcome {
    NoError,
    ErrorX,
    ErrorY,
    ErrorZ,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeHistory {
    pub outcomes: Vec<CycleOutcome>,
}

impl SyndromeHistory {
    pub fn error_count(&self) -> usize {
        self.outcomes.iter().filter(|o| **o != CycleOutcome::NoError).count()
    }

    pub fn is_flawless(&self) -> bool {
        self.error_count() == 0
    }
}

/// Local error probability and its quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalError {
    pub epsilon: f64,
    pub abs_error: f64,
    /// `ε ≥ 1`: the probabilistic reading of the integral has broken down.
    pub out_of_range: bool,
}

/// `ε = (λ*/2)² ∫₀^Δ∫₀^Δ dt₁dt₂ K(t₁ − t₂)` for a stationary kernel `K`,
/// reduced to `2 ∫₀^Δ (Δ − u) K(u) du`.
pub fn local_error_probability_with<K>(kernel: K, lambda_star: f64, delta: f64, breakpoints: &[f64]) -> Result<LocalError>
where
    K: Fn(f64) -> f64,
{
    require_non_negative("lambda_star", lambda_star)?;
    require_positive("delta", delta)?;
    let r = integrate(|u| (delta - u) * kernel(u), 0.0, delta, breakpoints, QuadOptions::with_rel_tol(1e-12))?;
    let scale = 0.25 * lambda_star * lambda_star;
    let epsilon = scale * 2.0 * r.value;
    Ok(LocalError {
        epsilon,
        abs_error: scale * 2.0 * r.abs_error,
        out_of_range: epsilon >= 1.0,
    })
}

/// Local error probability for the environment's regularised correlator.
pub fn local_error_probability(env: &EnvironmentSpec, lambda_star: f64, delta: f64) -> Result<LocalError> {
    env.validate()?;
    local_error_probability_with(|u| env.temporal_factor(u), lambda_star, delta, &[env.time_cutoff()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlawlessBranch {
    /// Leading-order power law.
    Generic,
    /// Log-resummed form at `z = 2δ`.
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlawlessProbability {
    /// `raw` clamped to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
    /// Multiplicative correction to `e^{−Nε}`.
    pub correction: f64,
    /// `correction − 1`, computed without cancellation.
    pub excess: f64,
    pub branch: FlawlessBranch,
    /// The generic prefactor is negative (`1 < 4δ/z < 2`).
    pub negative_correction: bool,
    /// The marginal denominator has crossed zero.
    pub beyond_pole: bool,
}

/// Exponent `a = 4δ/z` of the four-point function in time.
pub fn four_point_exponent(env: &EnvironmentSpec) -> f64 {
    2.0 * env.temporal_exponent()
}

/// Probability that all `N` cycles report no error, including the leading
/// correlation correction.
///
/// Generic: `e^{−Nε}{1 + (λ*Δ/2)⁴/(1−ε)² (τ₀/Δ)^a N^{2−a}/[(2−a)(1−a)]}` with `a = 4δ/z`.
/// Marginal (`z = 2δ`): `e^{−Nε}/(1 − (λ*Δ)⁴/(1−ε)² ln N)`.
pub fn flawless_probability(
    env: &EnvironmentSpec,
    schedule: &QecSchedule,
    lambda_star: f64,
    epsilon: f64,
) -> Result<FlawlessProbability> {
    env.validate()?;
    schedule.validate()?;
    require_non_negative("lambda_star", lambda_star)?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(param("epsilon", format!("must lie in [0, 1), got {epsilon}")));
    }
    let n = schedule.n_cycles as f64;
    let base = (-n * epsilon).exp();
    let a = four_point_exponent(env);
    let one_minus = (1.0 - epsilon).powi(2);

    if ((2.0 - a) / 2.0).abs() < MARGINAL_TOL {
        let g = (lambda_star * schedule.delta).powi(4) / one_minus;
        let denom = 1.0 - g * n.ln();
        let correction = 1.0 / denom;
        let raw = base * correction;
        return Ok(FlawlessProbability {
            value: clamp_unit(raw),
            raw,
            correction,
            excess: g * n.ln() / denom,
            branch: FlawlessBranch::Marginal,
            negative_correction: false,
            beyond_pole: denom <= 0.0,
        });
    }
    if (a - 1.0).abs() < SINGULAR_TOL {
        return Err(Error::SingularExponent { ratio: a });
    }
    let prefactor = 1.0 / ((2.0 - a) * (1.0 - a));
    let excess = (0.5 * lambda_star * schedule.delta).powi(4) / one_minus
        * (env.tau0 / schedule.delta).powf(a)
        * n.powf(2.0 - a)
        * prefactor;
    let correction = 1.0 + excess;
    let raw = base * correction;
    Ok(FlawlessProbability {
        value: clamp_unit(raw),
        raw,
        correction,
        excess,
        branch: FlawlessBranch::Generic,
        negative_correction: prefactor < 0.0,
        beyond_pole: false,
    })
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        x
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// Pole of the marginal resummation: `N = exp[(1−ε)²/(λ*Δ)⁴]`.
pub fn marginal_pole_cycles(lambda_star: f64, delta: f64, epsilon: f64) -> Result<f64> {
    require_non_negative("lambda_star", lambda_star)?;
    require_positive("delta", delta)?;
    let g = (lambda_star * delta).powi(4);
    Ok(if g == 0.0 {
        f64::INFINITY
    } else {
        ((1.0 - epsilon).powi(2) / g).exp()
    })
}

/// `N* ≈ exp[((1−ε)/(λ*Δ))²]`; `+∞` when the exponent overflows.
pub fn breakdown_cycles(lambda_star: f64, delta: f64, epsilon: f64) -> Result<f64> {
    require_non_negative("lambda_star", lambda_star)?;
    require_positive("delta", delta)?;
    let x = lambda_star * delta;
    if x == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(((1.0 - epsilon) / x).powi(2).exp())
}

/// Off-diagonal element of `M` logical qubits after a flawless history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualDecoherence {
    pub offdiagonal: Complex64,
    pub bracket: f64,
    /// `2NMε³`.
    pub stochastic_term: f64,
    /// `2ε⁴(λ*Δ/2)⁴ I`.
    pub correlation_term: f64,
    /// Inter-cycle four-point sum `I` in units of `Δ`.
    pub correlation_integral: f64,
    pub warnings: Vec<String>,
}

/// Lattice positions of `M` logical qubits spaced by `ξ` in `D` dimensions,
/// filling a hypercubic block in lexicographic order.
fn lattice_positions(n_logical: u32, spatial_dim: u32, spacing: f64) -> Vec<Vec<f64>> {
    if spatial_dim == 0 {
        return vec![Vec::new(); n_logical as usize];
    }
    let side = (n_logical as f64).powf(1.0 / spatial_dim as f64).ceil().max(1.0) as u64;
    (0..n_logical as u64)
        .map(|mut idx| {
            (0..spatial_dim)
                .map(|_| {
                    let c = idx % side;
                    idx /= side;
                    c as f64 * spacing
                })
                .collect()
        })
        .collect()
}

/// Four-point sum over cycle pairs with `|i − j| ≥ 1` and qubit pairs:
/// `Σ_{x,y} Σ_{k≠0} (N − |k|) ⟨:f²::f²:⟩(|x−y|, kΔ)`.
pub fn inter_cycle_four_point_sum(env: &EnvironmentSpec, schedule: &QecSchedule) -> Result<f64> {
    env.validate()?;
    schedule.validate()?;
    let xi = hypercube_length(env, schedule.delta)?;
    let pos = lattice_positions(schedule.n_logical, env.spatial_dim, xi);
    let n = schedule.n_cycles;
    let mut total = 0.0;
    for x in &pos {
        for y in &pos {
            let r = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            for k in 1..n {
                let g = four_point_normal_ordered(env, r, k as f64 * schedule.delta)?;
                total += 2.0 * (n - k) as f64 * g;
            }
        }
    }
    Ok(total)
}

/// `⟨ψ₀|↓⃗⟩⟨↑⃗|ψ₀⟩ [1 − 2NMε³ − 2ε⁴(λ*Δ/2)⁴ I]` with every logical qubit in `state`.
pub fn flawless_residual_decoherence(
    env: &EnvironmentSpec,
    schedule: &QecSchedule,
    lambda_star: f64,
    epsilon: f64,
    state: &LogicalState,
) -> Result<ResidualDecoherence> {
    require_non_negative("lambda_star", lambda_star)?;
    require_non_negative("epsilon", epsilon)?;
    let mut warnings = Vec::new();
    if epsilon > 0.3 {
        warnings.push(format!("epsilon = {epsilon} is outside the perturbative regime"));
    }
    if lambda_star > 0.3 {
        warnings.push(format!("lambda_star = {lambda_star} is outside the perturbative regime"));
    }
    let integral = inter_cycle_four_point_sum(env, schedule)?;
    let n = schedule.n_cycles as f64;
    let m = schedule.n_logical as f64;
    let stochastic_term = 2.0 * n * m * epsilon.powi(3);
    let correlation_term = 2.0 * epsilon.powi(4) * (0.5 * lambda_star * schedule.delta).powi(4) * integral;
    let bracket = 1.0 - stochastic_term - correlation_term;
    let overlap = state.coherence().powu(schedule.n_logical);
    Ok(ResidualDecoherence {
        offdiagonal: overlap * bracket,
        bracket,
        stochastic_term,
        correlation_term,
        correlation_integral: integral,
        warnings,
    })
}

/// Empirical distribution of error counts from the stochastic-limit model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistorySample {
    /// `m_counts[m]`: trials with `m` error cycles.
    pub m_counts: Vec<u64>,
    /// Error cycles per axis (X, Y, Z) over all trials.
    pub axis_counts: [u64; 3],
    pub n_trials: u64,
}

impl HistorySample {
    pub fn mean_errors(&self) -> f64 {
        let s: f64 = self.m_counts.iter().enumerate().map(|(m, &c)| m as f64 * c as f64).sum();
        s / self.n_trials as f64
    }

    /// CSV with header `m,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,count\n");
        for (m, c) in self.m_counts.iter().enumerate() {
            let _ = writeln!(out, "{m},{c}");
        }
        out
    }
}

/// One history with independent per-cycle errors on each axis.
pub fn draw_history<R: Rng>(rng: &mut R, epsilon_by_axis: &[f64; 3], n_cycles: u64) -> SyndromeHistory {
    let [ex, ey, ez] = *epsilon_by_axis;
    let outcomes = (0..n_cycles)
        .map(|_| {
            let u: f64 = rng.random();
            if u < ex {
                CycleOutcome::ErrorX
            } else if u < ex + ey {
                CycleOutcome::ErrorY
            } else if u < ex + ey + ez {
                CycleOutcome::ErrorZ
            } else {
                CycleOutcome::NoError
            }
        })
        .collect();
    SyndromeHistory { outcomes }
}

/// Samples `n_trials` histories; trial `i` uses stream `i` of `seed`, so the
/// result does not depend on the thread count.
pub fn sample_histories(epsilon_by_axis: [f64; 3], n_cycles: u64, n_trials: u64, seed: u64) -> Result<HistorySample> {
    for e in epsilon_by_axis {
        require_non_negative("epsilon_by_axis", e)?;
    }
    let total: f64 = epsilon_by_axis.iter().sum();
    if total > 1.0 {
        return Err(param("epsilon_by_axis", format!("sum {total} exceeds 1")));
    }
    let n_cycles_usize = n_cycles as usize;
    let parts: Vec<(Vec<u64>, [u64; 3])> = chunks(n_trials as usize)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(start, len)| {
            let mut m_counts = vec![0u64; n_cycles_usize + 1];
            let mut axis = [0u64; 3];
            for trial in start..start + len {
                let mut rng = trial_rng(seed, trial as u64);
                let h = draw_history(&mut rng, &epsilon_by_axis, n_cycles);
                for o in &h.outcomes {
                    match o {
                        CycleOutcome::ErrorX => axis[0] += 1,
                        CycleOutcome::ErrorY => axis[1] += 1,
                        CycleOutcome::ErrorZ => axis[2] += 1,
                        CycleOutcome::NoError => {}
                    }
                }
                m_counts[h.error_count()] += 1;
            }
            (m_counts, axis)
        })
        .collect();
    let mut m_counts = vec![0u64; n_cycles_usize + 1];
    let mut axis_counts = [0u64; 3];
    for (m, a) in parts {
        m_counts.iter_mut().zip(&m).for_each(|(t, c)| *t += c);
        axis_counts.iter_mut().zip(&a).for_each(|(t, c)| *t += c);
    }
    Ok(HistorySample {
        m_counts,
        axis_counts,
        n_trials,
    })
}
