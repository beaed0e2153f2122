//! Monte Carlo check of `⟨:f²: :f²:⟩ = 2 C²` for a Gaussian field.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::process::PSD_FLOOR;
use crate::error::{param, Error, Result};
use crate::noise::{two_point_correlator, EnvironmentSpec};
use crate::stats::{chunks, trial_rng, Estimate, Moments};

/// A space-time point `(x, t)`.
pub type Event = (f64, f64);

/// Samples `f` jointly at `events` from the environment correlator and
/// estimates `⟨:f_i²: :f_j²:⟩` with `:f²: = f² − ⟨f²⟩`.
pub fn four_point_mc(env: &EnvironmentSpec, events: &[Event], i: usize, j: usize, n_trials: usize, seed: u64) -> Result<Estimate> {
    let n = events.len();
    if i >= n || j >= n {
        return Err(param("events", format!("indices ({i}, {j}) outside {n} events")));
    }
    if n_trials < 2 {
        return Err(param("n_trials", "need at least 2 trials"));
    }
    let mut entries = Vec::with_capacity(n * n);
    for a in events {
        for b in events {
            entries.push(two_point_correlator(env, a.0 - b.0, a.1 - b.1)?);
        }
    }
    let cov = DMatrix::from_row_slice(n, n, &entries);
    let var_i = cov[(i, i)];
    let var_j = cov[(j, j)];
    let eig = SymmetricEigen::new(cov);
    let max = eig.eigenvalues.max();
    if eig.eigenvalues.min() < -PSD_FLOOR * max {
        return Err(Error::Model("correlator is not positive semidefinite on these events".into()));
    }
    let factor = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));

    let parts: Vec<Moments> = chunks(n_trials)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(start, len)| {
            let mut m = Moments::default();
            for trial in start..start + len {
                let mut rng = trial_rng(seed, trial as u64);
                let xi = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
                let f = &factor * xi;
                m.push((f[i] * f[i] - var_i) * (f[j] * f[j] - var_j));
            }
            m
        })
        .collect();
    let mut total = Moments::default();
    parts.iter().for_each(|p| total.merge(p));
    Ok(total.estimate())
}
