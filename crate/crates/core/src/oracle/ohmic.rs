//! Monte Carlo spin-boson dephasing.
//!
//! The accumulated phase `φ(t)` of a qubit in an ohmic bath is Gaussian with
//! stationary increments and `Var φ(t) = 2λ² ln(1 + Λt)`, so
//! `Cov(φ(s), φ(t)) = λ² [ln(1+Λs) + ln(1+Λt) − ln(1+Λ|t−s|)]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::process::PSD_FLOOR;
use crate::error::{param, require_non_negative, require_positive, Error, Result};
use crate::noise::BathTopology;
use crate::stats::{chunks, trial_rng, Estimate, Moments};

fn ohmic_factor(lambda: f64, cutoff: f64, times: &[f64]) -> Result<DMatrix<f64>> {
    let v = |t: f64| lambda * lambda * (cutoff * t).ln_1p();
    let n = times.len();
    let cov = DMatrix::from_fn(n, n, |i, j| v(times[i]) + v(times[j]) - v((times[i] - times[j]).abs()));
    let eig = SymmetricEigen::new(cov);
    let max = eig.eigenvalues.max();
    if eig.eigenvalues.min() < -PSD_FLOOR * max.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Model("ohmic phase covariance is not positive semidefinite".into()));
    }
    let roots = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    Ok(eig.eigenvectors * DMatrix::from_diagonal(&roots))
}

/// `⟨e^{i m φ}⟩` at each time, where `φ` is the sum of `copies` independent
/// ohmic phases.
fn decay_mc(
    lambda: f64,
    cutoff: f64,
    times: &[f64],
    copies: usize,
    multiplier: f64,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    require_non_negative("lambda", lambda)?;
    require_positive("cutoff_lambda", cutoff)?;
    for &t in times {
        require_non_negative("t", t)?;
    }
    if times.is_empty() || n_trials < 2 {
        return Err(param("times", "need at least one time and two trials"));
    }
    let factor = ohmic_factor(lambda, cutoff, times)?;
    let k = times.len();
    let parts: Vec<Vec<Moments>> = chunks(n_trials)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(start, len)| {
            let mut acc = vec![Moments::default(); k];
            for trial in start..start + len {
                let mut rng = trial_rng(seed, trial as u64);
                let mut phase = DVector::zeros(k);
                for _ in 0..copies {
                    let xi = DVector::from_iterator(k, (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)));
                    phase += &factor * xi;
                }
                for (a, p) in acc.iter_mut().zip(phase.iter()) {
                    a.push((multiplier * p).cos());
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); k];
    for part in &parts {
        total.iter_mut().zip(part).for_each(|(t, p)| t.merge(p));
    }
    Ok(total.iter().map(|m| m.estimate()).collect())
}

/// Single-qubit coherence `⟨cos φ(t)⟩`; exact value `(1 + Λt)^{−λ²}`.
pub fn spin_boson_decay_mc(lambda: f64, cutoff: f64, times: &[f64], n_trials: usize, seed: u64) -> Result<Vec<Estimate>> {
    decay_mc(lambda, cutoff, times, 1, 1.0, n_trials, seed)
}

/// Coherence between basis states whose magnetisations differ by `p − q`.
///
/// Independent baths: `|p − q|` qubits each carry their own phase.
/// Common bath: one phase couples to the total magnetisation.
pub fn multiqubit_decay_mc(
    lambda: f64,
    cutoff: f64,
    times: &[f64],
    p_minus_q: u32,
    bath: BathTopology,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    if p_minus_q == 0 {
        return Ok(vec![Estimate { mean: 1.0, std_err: 0.0 }; times.len()]);
    }
    match bath {
        BathTopology::Independent => decay_mc(lambda, cutoff, times, p_minus_q as usize, 1.0, n_trials, seed),
        BathTopology::Common => decay_mc(lambda, cutoff, times, 1, p_minus_q as f64, n_trials, seed),
    }
}
