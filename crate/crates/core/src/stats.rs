use serde::Serialize;

/// A binomial proportion with its standard error `sqrt(p(1-p)/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
    pub value: f64,
    pub standard_error: f64,
}

impl Rate {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials);
        if trials == 0 {
            return Self { successes, trials, value: 0.0, standard_error: 0.0 };
        }
        let p = successes as f64 / trials as f64;
        Self { successes, trials, value: p, standard_error: (p * (1.0 - p) / trials as f64).sqrt() }
    }

    /// Distance from `expected` in units of the binomial standard deviation
    /// implied by `expected` itself. Exact agreement is required when that
    /// deviation is zero.
    pub fn sigmas_from(&self, expected: f64) -> f64 {
        let sd = binomial_sd(expected, self.trials);
        let diff = (self.value - expected).abs();
        if sd == 0.0 {
            if diff <= 1e-15 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / sd
        }
    }
}

pub fn binomial_sd(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Running mean and variance (Welford) of a real-valued sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. parallel merge; merging in a fixed order keeps results
    /// bit-reproducible.
    pub fn merge(&mut self, other: &MeanAccumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn standard_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}
