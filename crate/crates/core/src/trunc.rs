//! Truncation functions and the soft-truncated robust mean.

use crate::math::{ln, sqrt};
use crate::{Error, Result};

/// Bounded odd influence function: `−log(1 − x + x²/2)` on `[0, 1]`, `log 2`
/// beyond 1, extended by oddness.
pub fn psi(x: f64) -> f64 {
    let a = x.abs();
    let v = if a >= 1.0 {
        core::f64::consts::LN_2
    } else {
        -ln(1.0 - a + 0.5 * a * a)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Soft truncation `−log(1 − x + x²/2)`, defined on all of ℝ since the
/// argument of the log is at least ½.
pub fn soft_trunc(x: f64) -> f64 {
    -ln(1.0 - x + 0.5 * x * x)
}

/// Scale and confidence level of the robust mean estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    lambda_mean: f64,
    epsilon: f64,
}

impl TruncationParams {
    /// Uses the default scale `√(2 log(1/ε) / n)`.
    pub fn for_sample(n: usize, epsilon: f64) -> Result<Self> {
        Ok(Self {
            lambda_mean: catoni_lambda(n, epsilon)?,
            epsilon,
        })
    }

    pub fn new(lambda_mean: f64, epsilon: f64) -> Result<Self> {
        if !(lambda_mean > 0.0) || !lambda_mean.is_finite() {
            return Err(Error::InvalidConfig(
                "mean-estimator scale must be positive",
            ));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(Self {
            lambda_mean,
            epsilon,
        })
    }

    pub fn lambda_mean(&self) -> f64 {
        self.lambda_mean
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn estimate(&self, samples: &[f64]) -> f64 {
        catoni_mean(samples, self.lambda_mean)
    }
}

/// `√(2 log(1/ε) / n)`.
pub fn catoni_lambda(n: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if n == 0 {
        return Err(Error::InvalidShape("sample size must be at least 1"));
    }
    Ok(sqrt(2.0 * ln(1.0 / epsilon) / n as f64))
}

/// `(1/(nλ)) Σ log(1 + λYᵢ + λ²Yᵢ²/2)`.
///
/// Each log argument is at least ½, so the result is finite for any finite
/// input; a single huge sample only moves the estimate logarithmically.
pub fn catoni_mean(samples: &[f64], lambda: f64) -> f64 {
    let n = samples.len() as f64;
    let s: f64 = samples
        .iter()
        .map(|&y| {
            let u = lambda * y;
            ln(1.0 + u + 0.5 * u * u)
        })
        .sum();
    s / (n * lambda)
}
