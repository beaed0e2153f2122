//! Classical Gaussian dephasing fields and their per-cycle phase statistics.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, require_non_negative, require_positive, Error, Result};
use crate::noise::EnvironmentSpec;
use crate::stats::{chunks, trial_rng};

/// Eigenvalues below `−PSD_FLOOR · max` reject a covariance.
pub const PSD_FLOOR: f64 = 1e-9;

/// Default time steps per QEC cycle.
pub const DEFAULT_STEPS: usize = 64;

/// Covariance of the classical field `λ f(t)` seen by one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhaseKernel {
    /// `λ² ⟨f(t) f(t′)⟩` from the regularised environment correlator at `dx = 0`.
    Correlator { env: EnvironmentSpec, lambda: f64 },
    /// `σ² δ(t − t′)`.
    White { sigma2: f64 },
    /// No noise.
    Zero,
}

/// A gridded Gaussian dephasing process driving independent qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingProcess {
    pub kernel: PhaseKernel,
    /// QEC cycle period Δ.
    pub delta: f64,
    pub steps_per_cycle: usize,
    /// Drop all covariance between different cycles.
    pub decorrelated: bool,
    pub seed: u64,
}

impl DephasingProcess {
    pub fn new(kernel: PhaseKernel, delta: f64, seed: u64) -> Result<Self> {
        let p = Self {
            kernel,
            delta,
            steps_per_cycle: DEFAULT_STEPS,
            decorrelated: false,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    /// White noise with per-cycle phase variance `var`.
    pub fn white_with_variance(var: f64, delta: f64, seed: u64) -> Result<Self> {
        require_non_negative("variance", var)?;
        require_positive("delta", delta)?;
        Self::new(PhaseKernel::White { sigma2: var / delta }, delta, seed)
    }

    pub fn with_steps(mut self, steps_per_cycle: usize) -> Result<Self> {
        self.steps_per_cycle = steps_per_cycle;
        self.validate()?;
        Ok(self)
    }

    pub fn decorrelated(mut self) -> Self {
        self.decorrelated = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("delta", self.delta)?;
        if self.steps_per_cycle == 0 {
            return Err(param("steps_per_cycle", "must be >= 1"));
        }
        match self.kernel {
            PhaseKernel::Correlator { env, lambda } => {
                env.validate()?;
                require_non_negative("lambda", lambda)
            }
            PhaseKernel::White { sigma2 } => require_non_negative("sigma2", sigma2),
            PhaseKernel::Zero => Ok(()),
        }
    }

    /// Gridded kernel value for a lag of `m` steps.
    fn grid_kernel(&self, m: i64, dt: f64) -> f64 {
        match self.kernel {
            PhaseKernel::Correlator { env, lambda } => lambda * lambda * env.temporal_factor(m as f64 * dt),
            PhaseKernel::White { sigma2 } => {
                if m == 0 {
                    sigma2 / dt
                } else {
                    0.0
                }
            }
            PhaseKernel::Zero => 0.0,
        }
    }

    /// Covariance `Cov(φ_c, φ_{c+k})` of the phases accumulated over cycles
    /// `c` and `c + k`, by the midpoint rule on the time grid:
    /// `dt² Σ_{|m|<n} (n − |m|) K((k n + m) dt)`.
    pub fn cycle_lag_covariance(&self, k: usize) -> f64 {
        if self.decorrelated && k > 0 {
            return 0.0;
        }
        let n = self.steps_per_cycle as i64;
        let dt = self.delta / n as f64;
        let base = k as i64 * n;
        let mut sum = 0.0;
        for m in -(n - 1)..n {
            sum += (n - m.abs()) as f64 * self.grid_kernel(base + m, dt);
        }
        dt * dt * sum
    }
}

/// Toeplitz covariance of `N` consecutive cycle phases and a square-root factor.
#[derive(Debug, Clone)]
pub struct CycleCovariance {
    pub lags: Vec<f64>,
    /// `L` with `L Lᵀ` the covariance after clipping tiny negative modes.
    factor: DMatrix<f64>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl CycleCovariance {
    pub fn new(process: &DephasingProcess, n_cycles: usize) -> Result<Self> {
        process.validate()?;
        if n_cycles == 0 {
            return Err(param("n_cycles", "must be >= 1"));
        }
        let lags: Vec<f64> = (0..n_cycles).map(|k| process.cycle_lag_covariance(k)).collect();
        let cov = DMatrix::from_fn(n_cycles, n_cycles, |i, j| lags[i.abs_diff(j)]);
        if lags.iter().all(|&b| b == 0.0) {
            return Ok(Self {
                lags,
                factor: DMatrix::zeros(n_cycles, n_cycles),
                min_eigenvalue: 0.0,
                max_eigenvalue: 0.0,
            });
        }
        let eig = SymmetricEigen::new(cov);
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if min < -PSD_FLOOR * max {
            return Err(Error::Model(format!(
                "cycle covariance is not positive semidefinite (eigenvalues {min:e} .. {max:e})"
            )));
        }
        let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        let factor = eig.eigenvectors * DMatrix::from_diagonal(&roots);
        Ok(Self {
            lags,
            factor,
            min_eigenvalue: min,
            max_eigenvalue: max,
        })
    }

    pub fn n_cycles(&self) -> usize {
        self.lags.len()
    }

    /// The covariance actually sampled, `L Lᵀ`.
    pub fn realised(&self) -> DMatrix<f64> {
        &self.factor * self.factor.transpose()
    }

    /// Correlated phases `L ξ` from independent standard normals `ξ`.
    pub fn sample<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        let n = self.n_cycles();
        let xi = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let phases = &self.factor * xi;
        out.copy_from_slice(phases.as_slice());
    }
}

/// Phases `φ[trial][qubit][cycle]`, stored trial-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    pub n_trials: usize,
    pub n_qubits: usize,
    pub n_cycles: usize,
    pub data: Vec<f64>,
}

impl PhaseTable {
    pub fn get(&self, trial: usize, qubit: usize, cycle: usize) -> f64 {
        self.data[(trial * self.n_qubits + qubit) * self.n_cycles + cycle]
    }

    pub fn trial(&self, trial: usize) -> &[f64] {
        let w = self.n_qubits * self.n_cycles;
        &self.data[trial * w..(trial + 1) * w]
    }
}

/// Draws the per-cycle phases of `n_qubits` independent qubits. Qubits are
/// spaced by at least the hypercube length, so they share no covariance.
/// Trial `i` uses stream `i` of the process seed.
pub fn sample_phases(process: &DephasingProcess, n_qubits: usize, n_cycles: usize, n_trials: usize) -> Result<PhaseTable> {
    let cov = CycleCovariance::new(process, n_cycles)?;
    let width = n_qubits * n_cycles;
    let blocks: Vec<Vec<f64>> = chunks(n_trials)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(start, len)| {
            let mut block = vec![0.0; len * width];
            for (t, row) in block.chunks_mut(width.max(1)).enumerate().take(len) {
                let mut rng = trial_rng(process.seed, (start + t) as u64);
                for q in 0..n_qubits {
                    cov.sample(&mut rng, &mut row[q * n_cycles..(q + 1) * n_cycles]);
                }
            }
            block
        })
        .collect();
    Ok(PhaseTable {
        n_trials,
        n_qubits,
        n_cycles,
        data: blocks.concat(),
    })
}
