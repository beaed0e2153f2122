//! Brute-force ground truth.
//!
//! A zero-mean classical Gaussian field `λ f(t)` coupled through σ^z is an
//! exact unravelling of commuting dephasing noise. Sampling its phase record
//! and evolving the code state per trial reproduces the reduced dynamics
//! without truncating any bath Hilbert space. Bit-flip channels are outside
//! its reach and are covered by the closed forms only.
//!
//! All samplers draw trial `i` from stream `i` of the seed and reduce
//! fixed-size chunks in order, so results do not depend on the thread count.

mod brute;
mod dyson;
mod ohmic;
mod process;
mod qec;
mod wick;

pub use brute::{flawless_excess_quadrature, trapezoid_local_error, TrapezoidLocalError};
pub use dyson::{dyson_norm_bound, dyson_partial_sums, DysonRow};
pub use ohmic::{multiqubit_decay_mc, spin_boson_decay_mc};
pub use process::{sample_phases, CycleCovariance, DephasingProcess, PhaseKernel, PhaseTable, DEFAULT_STEPS, PSD_FLOOR};
pub use qec::{
    cycle_branches, epsilon_for_variance, exact_cycle_statistics, flawless_trajectory, multi_cycle_offdiagonal,
    variance_for_epsilon, CycleBranch, CycleEstimates, FlawlessDecay, FlawlessStep,
};
pub use wick::{four_point_mc, Event};

/// Per-qubit per-cycle flip probability `(1 − e^{−B₀/2})/2` of a process.
pub fn process_epsilon(process: &DephasingProcess) -> f64 {
    epsilon_for_variance(process.cycle_lag_covariance(0))
}
