//! Small Monte Carlo helpers shared by the oracle and the sampler.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    /// Number of standard errors between the estimate and `target`.
    ///
    /// A zero standard error yields 0 on exact agreement and infinity otherwise.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = (self.mean - target).abs();
        if self.std_err > 0.0 {
            diff / self.std_err
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        self.z_score(target) <= sigmas
    }
}

/// Running first and second moments (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two accumulators (Chan et al.); order-dependent only in rounding.
    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> Estimate {
        let std_err = if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        };
        Estimate {
            mean: self.mean,
            std_err,
        }
    }
}

/// Accumulates pairs `(x, y)` for the ratio estimator `E[x]/E[y]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatioMoments {
    n: u64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl RatioMoments {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sx += other.sx;
        self.sy += other.sy;
        self.sxx += other.sxx;
        self.syy += other.syy;
        self.sxy += other.sxy;
    }

    /// Ratio of means with its delta-method standard error.
    pub fn estimate(&self) -> Estimate {
        let n = self.n as f64;
        let (mx, my) = (self.sx / n, self.sy / n);
        let r = mx / my;
        if self.n < 2 {
            return Estimate { mean: r, std_err: 0.0 };
        }
        let vxx = (self.sxx - n * mx * mx) / (n - 1.0);
        let vyy = (self.syy - n * my * my) / (n - 1.0);
        let vxy = (self.sxy - n * mx * my) / (n - 1.0);
        let var = (vxx - 2.0 * r * vxy + r * r * vyy).max(0.0) / (n * my * my);
        Estimate {
            mean: r,
            std_err: var.sqrt(),
        }
    }
}

/// Trials per parallel work unit. Fixed so results do not depend on the pool size.
pub const CHUNK: usize = 4096;

/// Per-trial generator: stream `trial` of the ChaCha8 sequence keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Splits `n` trials into `(start, len)` chunks of [`CHUNK`].
pub fn chunks(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n.div_ceil(CHUNK)).map(move |c| {
        let start = c * CHUNK;
        (start, CHUNK.min(n - start))
    })
}
