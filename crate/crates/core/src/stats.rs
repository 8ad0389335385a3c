//! Summary statistics over repetition-level means.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("need at least 2 samples, got {0}")]
pub struct InsufficientData(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub stddev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

impl StatsSummary {
    pub fn from_samples(samples: &[f64]) -> Result<Self, InsufficientData> {
        let n = samples.len();
        if n < 2 {
            return Err(InsufficientData(n));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(Self::from_moments(mean, var.sqrt(), n))
    }

    /// CI as `mean ± 1.96 · stddev / √n`.
    pub fn from_moments(mean: f64, stddev: f64, n: usize) -> Self {
        let half = confidence_half_width(stddev, n);
        Self {
            mean,
            stddev,
            ci_low: mean - half,
            ci_high: mean + half,
            n,
        }
    }

    pub fn standard_error(&self) -> f64 {
        self.stddev / (self.n as f64).sqrt()
    }
}

pub fn confidence_half_width(stddev: f64, n: usize) -> f64 {
    Z95 * stddev / (n as f64).sqrt()
}

pub fn mean(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().sum::<f64>() / samples.len() as f64
}
