//! Quantum error correction under correlated, non-Markovian noise.
//!
//! The crate turns the Hamiltonian description of a quantum computer running
//! error correction in a power-law correlated environment into numerics:
//!
//! * [`noise`]: regularised correlators, hypercube length, spin-boson decay.
//! * [`rg`]: Kondo and quantum-frustrated beta functions and their flows.
//! * [`code3`]: exact algebra of the 3-qubit phase-flip code.
//! * [`histories`]: local error probability, flawless-evolution probability,
//!   residual decoherence and a syndrome-history sampler.
//! * [`phase`]: the `D + z − 2δ` classifier and phase-diagram scans.
//! * [`oracle`]: a classical Gaussian dephasing simulator that serves as
//!   brute-force ground truth for the closed forms.

pub mod code3;
pub mod error;
pub mod histories;
pub mod noise;
pub mod oracle;
pub mod phase;
pub mod quad;
pub mod rg;
pub mod stats;

pub use error::{Error, Result};

/// Locale-independent float formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
