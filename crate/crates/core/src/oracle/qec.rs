//! Exact per-trial simulation of the 3-qubit phase-flip code under
//! classical Gaussian dephasing.
//!
//! Pure σ^z noise commutes with itself, so a sampled phase record evolves
//! the code state by a product of single-qubit rotations and the trial
//! average reproduces the reduced dynamics exactly.

use nalgebra::{Cholesky, DMatrix};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::process::{CycleCovariance, DephasingProcess};
use crate::code3::{encode, logical_amplitudes, LogicalState, Syndrome, ThreeQubitState};
use crate::error::{param, Error, Result};
use crate::stats::{chunks, trial_rng, Estimate, Moments, RatioMoments};

/// Outcome of one cycle for a fixed phase record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleBranch {
    pub syndrome: Syndrome,
    pub probability: f64,
    /// Unnormalised logical coherence after recovery, `A B*`.
    pub coherence: Complex64,
}

/// All four syndrome branches of one cycle, with recovery applied.
pub fn cycle_branches(state: &LogicalState, phases: &[f64; 3]) -> [CycleBranch; 4] {
    let mut psi = encode(state);
    psi.apply_phases(phases);
    Syndrome::ALL.map(|s| {
        let mut branch = psi.project_syndrome(s);
        let probability = branch.norm_sqr();
        if let Some(q) = s.flipped_qubit() {
            branch.apply_z(q);
        }
        let (a, b) = logical_amplitudes(&branch);
        CycleBranch {
            syndrome: s,
            probability,
            coherence: a * b.conj(),
        }
    })
}

/// Oracle estimates for one QEC cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleEstimates {
    /// `⟨sin²(φ/2)⟩` averaged over qubits.
    pub epsilon: Estimate,
    /// Fraction of trials whose Born-sampled syndrome is non-trivial.
    pub p1_sampled: Estimate,
    /// Trial average of the exact non-trivial syndrome probability.
    pub p1_exact: Estimate,
    /// Logical coherence factor after a corrected error cycle.
    pub dephasing_error: Estimate,
    /// Logical coherence factor after a cycle with trivial syndrome.
    pub dephasing_no_error: Estimate,
    /// `1 − dephasing_no_error`, estimated directly.
    pub no_error_deviation: Estimate,
}

#[derive(Default, Clone, Copy)]
struct CycleAcc {
    eps: Moments,
    p1_sampled: Moments,
    p1_exact: Moments,
    err: RatioMoments,
    no_err: RatioMoments,
    deviation: RatioMoments,
}

impl CycleAcc {
    fn merge(&mut self, o: &Self) {
        self.eps.merge(&o.eps);
        self.p1_sampled.merge(&o.p1_sampled);
        self.p1_exact.merge(&o.p1_exact);
        self.err.merge(&o.err);
        self.no_err.merge(&o.no_err);
        self.deviation.merge(&o.deviation);
    }
}

/// One cycle per trial on three independent qubits starting in `state`.
pub fn exact_cycle_statistics(process: &DephasingProcess, state: &LogicalState, n_trials: usize) -> Result<CycleEstimates> {
    if n_trials < 2 {
        return Err(param("n_trials", "need at least 2 trials for standard errors"));
    }
    let bare = state.coherence();
    if bare.norm() == 0.0 {
        return Err(param("state", "coherence αβ* must be non-zero"));
    }
    let cov = CycleCovariance::new(process, 1)?;
    let parts: Vec<CycleAcc> = chunks(n_trials)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(start, len)| {
            let mut acc = CycleAcc::default();
            let mut phi = [0.0; 3];
            for trial in start..start + len {
                let mut rng = trial_rng(process.seed, trial as u64);
                for p in phi.iter_mut() {
                    cov.sample(&mut rng, std::slice::from_mut(p));
                }
                acc.eps.push(phi.iter().map(|p| (0.5 * p).sin().powi(2)).sum::<f64>() / 3.0);

                let branches = cycle_branches(state, &phi);
                let p0 = branches[0].probability;
                let p1: f64 = branches[1..].iter().map(|b| b.probability).sum();
                acc.p1_exact.push(p1);
                let u: f64 = rng.random();
                acc.p1_sampled.push(if u < p1 { 1.0 } else { 0.0 });

                let c0 = (branches[0].coherence / bare).re;
                acc.no_err.push(c0, p0);
                acc.deviation.push(p0 - c0, p0);
                let c1: f64 = branches[1..].iter().map(|b| (b.coherence / bare).re).sum();
                acc.err.push(c1, p1);
            }
            acc
        })
        .collect();
    let mut total = CycleAcc::default();
    parts.iter().for_each(|p| total.merge(p));
    Ok(CycleEstimates {
        epsilon: total.eps.estimate(),
        p1_sampled: total.p1_sampled.estimate(),
        p1_exact: total.p1_exact.estimate(),
        dephasing_error: total.err.estimate(),
        dephasing_no_error: total.no_err.estimate(),
        no_error_deviation: total.deviation.estimate(),
    })
}

/// Per-qubit variance giving `⟨sin²(φ/2)⟩ = ε` for a Gaussian phase.
pub fn variance_for_epsilon(epsilon: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(param("epsilon", format!("must lie in [0, 0.5), got {epsilon}")));
    }
    Ok(-2.0 * (-2.0 * epsilon).ln_1p())
}

/// `⟨sin²(φ/2)⟩ = (1 − e^{−Var/2})/2`.
pub fn epsilon_for_variance(var: f64) -> f64 {
    -0.5 * (-0.5 * var).exp_m1()
}

/// State after one step of a flawless history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlawlessStep {
    /// Probability that every syndrome so far was trivial.
    pub probability: f64,
    /// Conditional logical coherence `A B*`.
    pub coherence: Complex64,
    /// Norm of the conditional state after renormalisation.
    pub norm_after: f64,
}

/// Evolves one trial through successive cycles, projecting onto the trivial
/// syndrome and renormalising after each.
pub fn flawless_trajectory(state: &LogicalState, phases: &[[f64; 3]]) -> Vec<FlawlessStep> {
    let mut psi: ThreeQubitState = encode(state);
    let mut probability = 1.0;
    phases
        .iter()
        .map(|phi| {
            psi.apply_phases(phi);
            let projected = psi.project_syndrome(Syndrome::TRIVIAL);
            let p = projected.norm_sqr();
            probability *= p;
            psi = projected.normalized();
            let (a, b) = logical_amplitudes(&psi);
            FlawlessStep {
                probability,
                coherence: a * b.conj(),
                norm_after: psi.norm_sqr(),
            }
        })
        .collect()
}

/// Flawless-history probability and conditional coherence versus `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlawlessDecay {
    /// Entry `N − 1` refers to `N` cycles.
    pub probability: Vec<Estimate>,
    /// Conditional coherence relative to `αβ*`.
    pub coherence: Vec<Estimate>,
    /// Per-qubit per-cycle flip probability `⟨sin²(φ/2)⟩` of the process.
    pub epsilon: f64,
    /// `Cov(P̂(N), P̂(M))` of the probability estimator.
    estimator_cov: Vec<Vec<f64>>,
}

impl FlawlessDecay {
    pub fn n_max(&self) -> usize {
        self.probability.len()
    }

    fn p(&self, n: usize) -> f64 {
        self.probability[n - 1].mean
    }

    fn cov(&self, a: usize, b: usize) -> f64 {
        self.estimator_cov[a - 1][b - 1]
    }

    fn linear_se(&self, grad: &[(usize, f64)]) -> f64 {
        let mut var = 0.0;
        for &(i, gi) in grad {
            for &(j, gj) in grad {
                var += gi * gj * self.cov(i, j);
            }
        }
        var.max(0.0).sqrt()
    }

    /// `D(N) = ln P(2N) − 2 ln P(N)`: the log-excess of a 2N-cycle history
    /// over two independent N-cycle halves. It removes every contribution
    /// linear in N, including the stochastic `e^{−Nε}` decay.
    pub fn log_excess(&self, n: usize) -> Result<Estimate> {
        self.check(2 * n)?;
        let (p1, p2) = (self.p(n), self.p(2 * n));
        let mean = p2.ln() - 2.0 * p1.ln();
        Ok(Estimate {
            mean,
            std_err: self.linear_se(&[(n, -2.0 / p1), (2 * n, 1.0 / p2)]),
        })
    }

    /// `log₂[D(2N)/D(N)]`: about `2 − 4δ/z` while the excess grows, 0 once it saturates.
    pub fn growth_exponent(&self, n: usize) -> Result<Estimate> {
        self.check(4 * n)?;
        let d1 = self.log_excess(n)?.mean;
        let d2 = self.log_excess(2 * n)?.mean;
        if d1 <= 0.0 || d2 <= 0.0 {
            return Err(Error::Numerical(format!(
                "log-excess not positive (D({n}) = {d1:e}, D({}) = {d2:e})",
                2 * n
            )));
        }
        let (p1, p2, p4) = (self.p(n), self.p(2 * n), self.p(4 * n));
        let l2 = std::f64::consts::LN_2;
        let grad = [
            (n, 2.0 / (l2 * d1 * p1)),
            (2 * n, (-2.0 / (p2 * d2) - 1.0 / (p2 * d1)) / l2),
            (4 * n, 1.0 / (l2 * p4 * d2)),
        ];
        Ok(Estimate {
            mean: (d2 / d1).log2(),
            std_err: self.linear_se(&grad),
        })
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_max() {
            return Err(param("n", format!("needs {n} cycles, decay computed up to {}", self.n_max())));
        }
        Ok(())
    }
}

struct DecayAcc {
    z: Vec<f64>,
    zz: Vec<f64>,
    coh: Vec<RatioMoments>,
}

impl DecayAcc {
    fn new(n: usize) -> Self {
        Self {
            z: vec![0.0; n],
            zz: vec![0.0; n * n],
            coh: vec![RatioMoments::default(); n],
        }
    }

    fn merge(&mut self, o: &Self) {
        self.z.iter_mut().zip(&o.z).for_each(|(a, b)| *a += b);
        self.zz.iter_mut().zip(&o.zz).for_each(|(a, b)| *a += b);
        self.coh.iter_mut().zip(&o.coh).for_each(|(a, b)| a.merge(b));
    }
}

/// Ensemble over `n_trials` of flawless histories up to `n_cycles`, with the
/// phase record correlated across cycle boundaries.
///
/// The probability uses the control variate `Y = exp(−Σφ²/4)`, whose mean
/// `det(I + B/2)^{−3/2}` is known in closed form and which tracks the
/// per-trial probability to second order in the phases.
pub fn multi_cycle_offdiagonal(
    process: &DephasingProcess,
    state: &LogicalState,
    n_cycles: usize,
    n_trials: usize,
) -> Result<FlawlessDecay> {
    if n_trials < 2 {
        return Err(param("n_trials", "need at least 2 trials for standard errors"));
    }
    let bare = state.coherence();
    if bare.norm() == 0.0 {
        return Err(param("state", "coherence αβ* must be non-zero"));
    }
    let cov = CycleCovariance::new(process, n_cycles)?;
    let expected_y = control_variate_means(&cov)?;
    let n = n_cycles;

    let parts: Vec<DecayAcc> = chunks(n_trials)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(start, len)| {
            let mut acc = DecayAcc::new(n);
            let mut phases = vec![0.0; 3 * n];
            let mut record = vec![[0.0; 3]; n];
            let mut z = vec![0.0; n];
            for trial in start..start + len {
                let mut rng = trial_rng(process.seed, trial as u64);
                for q in 0..3 {
                    cov.sample(&mut rng, &mut phases[q * n..(q + 1) * n]);
                }
                for (c, r) in record.iter_mut().enumerate() {
                    *r = [phases[c], phases[n + c], phases[2 * n + c]];
                }
                let steps = flawless_trajectory(state, &record);
                let mut sum_sq = 0.0;
                for (c, step) in steps.iter().enumerate() {
                    sum_sq += record[c].iter().map(|p| p * p).sum::<f64>();
                    z[c] = step.probability - (-0.25 * sum_sq).exp();
                    let coherence = (step.coherence / bare).re * step.probability;
                    acc.coh[c].push(coherence, step.probability);
                }
                for i in 0..n {
                    acc.z[i] += z[i];
                    for j in i..n {
                        acc.zz[i * n + j] += z[i] * z[j];
                    }
                }
            }
            acc
        })
        .collect();

    let mut total = DecayAcc::new(n);
    parts.iter().for_each(|p| total.merge(p));
    let t = n_trials as f64;
    let mean_z: Vec<f64> = total.z.iter().map(|s| s / t).collect();
    let mut estimator_cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let c = (total.zz[i * n + j] - t * mean_z[i] * mean_z[j]) / (t - 1.0) / t;
            estimator_cov[i][j] = c;
            estimator_cov[j][i] = c;
        }
    }
    let probability = (0..n)
        .map(|i| Estimate {
            mean: expected_y[i] + mean_z[i],
            std_err: estimator_cov[i][i].max(0.0).sqrt(),
        })
        .collect();
    let coherence = total.coh.iter().map(|c| c.estimate()).collect();
    Ok(FlawlessDecay {
        probability,
        coherence,
        epsilon: super::process_epsilon(process),
        estimator_cov,
    })
}

/// `E[exp(−Σ_{c<N} φ_c²/4)]³ = det(I + B_N/2)^{−3/2}` for every prefix `N`,
/// from the Cholesky diagonal of `I + B/2`.
fn control_variate_means(cov: &CycleCovariance) -> Result<Vec<f64>> {
    let n = cov.n_cycles();
    let m = DMatrix::identity(n, n) + cov.realised() * 0.5;
    let chol = Cholesky::new(m).ok_or_else(|| Error::Numerical("I + B/2 is not positive definite".into()))?;
    let l = chol.l();
    let mut log_det = 0.0;
    Ok((0..n)
        .map(|i| {
            log_det += 2.0 * l[(i, i)].ln();
            (-1.5 * log_det).exp()
        })
        .collect())
}
