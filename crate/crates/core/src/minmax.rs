//! The min-max truncated estimator.
//!
//! The estimator targets `argmin_θ sup_θ′ D(θ, θ′)` where
//!
//! ```text
//! D(θ, θ′) = nαλ(‖θ‖² − ‖θ′‖²) + Σᵢ ψ(α[Yᵢ − ⟨θ, Xᵢ⟩]² − α[Yᵢ − ⟨θ′, Xᵢ⟩]²)
//! ```
//!
//! Since `ψ` saturates outside `[−1, 1]`, the map `θ ↦ D(θ, θ̂_k)` is piecewise
//! constant in each observation once that observation's loss moves by more
//! than `1/α`. [`iterate`] exploits this: starting from the least-squares fit
//! on every point, it repeatedly drops the observations whose saturation
//! boundary is closest to the current iterate (in the `Q̂_k` metric), refits,
//! readjusts the kept set to the constraints that are actually active, and
//! accepts a candidate only if it beats every previous iterate under `D`.
//! [`fit`] scans a geometric grid of truncation levels `α` upward and stops at
//! the first one that moves away from least squares.

use alloc::vec;
use alloc::vec::Vec;

use crate::lin::{solve_penalized, subset_gram, Dataset, ParamVector};
use crate::math::sqrt;
use crate::trunc::psi;
use crate::{Error, Result};

/// Tuning of the min-max estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxConfig {
    /// Ridge parameter `λ` (0 reproduces the unpenalized experiments).
    pub lambda_ridge: f64,
    /// Number of `α` values scanned by [`fit`].
    pub alpha_grid_size: usize,
    /// Ratio between consecutive `α` values.
    pub alpha_grid_ratio: f64,
    /// Divisor `s` of the grid center `1/(s·σ̂²)`. The default `24 = 8χκ′`
    /// uses the Gaussian kurtosis values `χ = κ′ = √3`.
    pub alpha_center_scale: f64,
    /// 1-based ranks in the decreasing list of removal scores used as cut levels `η`.
    pub eta_ranks: Vec<usize>,
    /// Relative distance below which two parameter vectors count as equal.
    pub equality_tol: f64,
}

impl Default for MinMaxConfig {
    fn default() -> Self {
        Self {
            lambda_ridge: 0.0,
            alpha_grid_size: 8,
            alpha_grid_ratio: 3.0,
            alpha_center_scale: 24.0,
            eta_ranks: vec![1, 5, 25],
            equality_tol: 1e-9,
        }
    }
}

impl MinMaxConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_ridge >= 0.0) || !self.lambda_ridge.is_finite() {
            return Err(Error::NegativeLambda(self.lambda_ridge));
        }
        if self.alpha_grid_size == 0 {
            return Err(Error::InvalidConfig("alpha grid needs at least one point"));
        }
        if !(self.alpha_grid_ratio > 1.0) || !self.alpha_grid_ratio.is_finite() {
            return Err(Error::InvalidConfig("alpha grid ratio must exceed 1"));
        }
        if !(self.alpha_center_scale > 0.0) || !self.alpha_center_scale.is_finite() {
            return Err(Error::InvalidConfig("alpha center scale must be positive"));
        }
        if self.eta_ranks.is_empty()
            || self.eta_ranks[0] == 0
            || self.eta_ranks.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidConfig(
                "eta ranks must be positive and strictly increasing",
            ));
        }
        if !(self.equality_tol > 0.0) {
            return Err(Error::InvalidConfig("equality tolerance must be positive"));
        }
        Ok(())
    }

    /// `‖a − b‖ ≤ tol·(1 + ‖b‖)`.
    pub fn same_params(&self, a: &ParamVector, b: &ParamVector) -> bool {
        a.distance(b) <= self.equality_tol * (1.0 + b.norm())
    }
}

/// One accepted iterate: the parameter and the index set it was fitted on.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub theta: ParamVector,
    pub active_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult {
    pub theta_hat: ParamVector,
    /// Index set of the final iterate, sorted.
    pub active_set: Vec<usize>,
    /// Accepted iterates, first entry being least squares on every point.
    pub trace: Vec<TraceStep>,
    pub alpha_used: f64,
    pub stopped_at_first_iteration: bool,
    /// `max_j D(θ̂_{k+1}, θ̂_j)` of the candidate that triggered the stop, when
    /// a candidate existed.
    pub final_criterion: Option<f64>,
}

impl EstimatorResult {
    /// Number of observations outside the final active set.
    pub fn n_removed(&self, n: usize) -> usize {
        n - self.active_set.len()
    }

    /// Per-observation flag, `true` when the point was discarded.
    pub fn erased_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![true; n];
        for &i in &self.active_set {
            mask[i] = false;
        }
        mask
    }
}

/// Truncated criterion `D(θ, θ′)`; antisymmetric in its two parameters.
pub fn criterion_d(
    theta: &ParamVector,
    theta_prime: &ParamVector,
    data: &Dataset,
    alpha: f64,
    lambda: f64,
) -> f64 {
    let n = data.len();
    let penalty = n as f64 * alpha * lambda * (theta.norm_sq() - theta_prime.norm_sq());
    let sum: f64 = (0..n)
        .map(|i| {
            let r = data.residual(i, theta);
            let rp = data.residual(i, theta_prime);
            psi(alpha * (r * r) - alpha * (rp * rp))
        })
        .sum();
    penalty + sum
}

/// `L̄ᵢ(θ) = α(⟨θ, Xᵢ⟩ − Yᵢ)²`.
fn scaled_loss(data: &Dataset, i: usize, theta: &ParamVector, alpha: f64) -> f64 {
    let r = data.residual(i, theta);
    alpha * r * r
}

/// `L̄ (1 + √(1 + 1/L̄))²` written as `(√L̄ + √(L̄ + 1))²`, which is finite and
/// equal to 1 at `L̄ = 0`.
fn saturation_factor(scaled_loss: f64) -> f64 {
    let s = sqrt(scaled_loss) + sqrt(scaled_loss + 1.0);
    s * s
}

/// Removal score of observation `i` at the iterate `theta_k`:
/// `L̄ᵢ · Xᵢᵀ Q̂_k⁺ Xᵢ · (1 + √(1 + 1/L̄ᵢ))²`, with `Q̂_k` the Gram matrix of
/// `active`. Larger scores mean the point saturates closer to `theta_k`.
pub fn leverage_removal_score(
    i: usize,
    theta_k: &ParamVector,
    data: &Dataset,
    active: &[usize],
    alpha: f64,
) -> Result<f64> {
    if !active.contains(&i) {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: active.len(),
        });
    }
    let gram = subset_gram(data, active);
    let lev = gram.inverse_quadratic(data.row(i), 0.0);
    Ok(lev * saturation_factor(scaled_loss(data, i, theta_k, alpha)))
}

fn removal_scores(data: &Dataset, theta: &ParamVector, active: &[usize], alpha: f64) -> Vec<f64> {
    let gram = subset_gram(data, active);
    active
        .iter()
        .map(|&i| {
            let lev = gram.inverse_quadratic(data.row(i), 0.0);
            lev * saturation_factor(scaled_loss(data, i, theta, alpha))
        })
        .collect()
}

/// Cut levels `η`: the scores at the configured ranks of the decreasing order,
/// clamped to the number of scores and deduplicated, largest first.
fn eta_levels(scores: &[f64], ranks: &[usize]) -> Vec<f64> {
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<f64> = Vec::with_capacity(ranks.len());
    for &r in ranks {
        let eta = sorted[r.min(sorted.len()) - 1];
        if out.last() != Some(&eta) {
            out.push(eta);
        }
    }
    out
}

struct Candidate {
    theta: ParamVector,
    set: Vec<usize>,
    stage: u8,
    eta: f64,
    worst: f64,
}

impl Candidate {
    /// Lower worst-case criterion wins; ties prefer stage 1, then larger `η`.
    fn beats(&self, other: &Candidate) -> bool {
        match self.worst.total_cmp(&other.worst) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Greater => false,
            core::cmp::Ordering::Equal => (self.stage, -self.eta) < (other.stage, -other.eta),
        }
    }
}

/// Runs the example-removal heuristic at a fixed truncation level `alpha`.
///
/// Stops when the best candidate fails to beat every previous iterate
/// (`max_j D(θ_cand, θ̂_j) ≥ 0`), when no candidate survives, or when the
/// selected index set would not shrink. The returned `theta_hat` is the last
/// accepted iterate.
pub fn iterate(data: &Dataset, alpha: f64, config: &MinMaxConfig) -> Result<EstimatorResult> {
    config.validate()?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidConfig("alpha must be positive and finite"));
    }
    if data.is_empty() {
        return Err(Error::EmptySubset);
    }
    let lambda = config.lambda_ridge;
    let n = data.len();
    let all: Vec<usize> = (0..n).collect();
    let erm = solve_penalized(data, &all, lambda)?;
    let mut trace = vec![TraceStep {
        theta: erm,
        active_set: all,
    }];
    let mut final_criterion = None;

    loop {
        let current = trace.last().expect("trace is never empty");
        let theta_k = &current.theta;
        let active = &current.active_set;
        let scores = removal_scores(data, theta_k, active, alpha);
        let losses_k: Vec<f64> = active
            .iter()
            .map(|&i| scaled_loss(data, i, theta_k, alpha))
            .collect();

        let mut best: Option<Candidate> = None;
        let mut consider = |theta: ParamVector, set: Vec<usize>, stage: u8, eta: f64| {
            // A candidate equal to the current iterate cannot improve on it.
            if config.same_params(&theta, theta_k) {
                return;
            }
            let worst = trace
                .iter()
                .map(|step| criterion_d(&theta, &step.theta, data, alpha, lambda))
                .fold(f64::NEG_INFINITY, f64::max);
            let cand = Candidate {
                theta,
                set,
                stage,
                eta,
                worst,
            };
            if best.as_ref().is_none_or(|b| cand.beats(b)) {
                best = Some(cand);
            }
        };

        for eta in eta_levels(&scores, &config.eta_ranks) {
            let first: Vec<usize> = active
                .iter()
                .zip(&scores)
                .filter(|(_, &s)| s < eta)
                .map(|(&i, _)| i)
                .collect();
            if first.is_empty() {
                continue;
            }
            let theta_1 = solve_penalized(data, &first, lambda)?;
            let second: Vec<usize> = active
                .iter()
                .zip(&losses_k)
                .filter(|(&i, &lk)| (scaled_loss(data, i, &theta_1, alpha) - lk).abs() <= 1.0)
                .map(|(&i, _)| i)
                .collect();
            let theta_2 = if second.is_empty() {
                None
            } else {
                Some(solve_penalized(data, &second, lambda)?)
            };
            consider(theta_1, first, 1, eta);
            if let Some(theta_2) = theta_2 {
                consider(theta_2, second, 2, eta);
            }
        }

        let Some(cand) = best else { break };
        final_criterion = Some(cand.worst);
        if cand.worst >= 0.0 || cand.set.len() >= active.len() {
            break;
        }
        trace.push(TraceStep {
            theta: cand.theta,
            active_set: cand.set,
        });
    }

    let last = trace.last().expect("trace is never empty");
    Ok(EstimatorResult {
        theta_hat: last.theta.clone(),
        active_set: last.active_set.clone(),
        stopped_at_first_iteration: trace.len() == 1,
        alpha_used: alpha,
        final_criterion,
        trace,
    })
}

/// Truncation level used when least squares fits the data exactly.
pub const DEGENERATE_ALPHA: f64 = 1e300;

/// Residual variance below which the least-squares fit counts as exact,
/// relative to the mean squared output.
const PERFECT_FIT_RTOL: f64 = 1e-24;

/// Least-squares residual variance `r(f̂_ols)` and whether it is numerically zero.
fn ols_residual_variance(data: &Dataset, lambda: f64) -> Result<(f64, bool)> {
    let all: Vec<usize> = (0..data.len()).collect();
    let erm = solve_penalized(data, &all, lambda)?;
    let var = data.empirical_risk(&erm);
    let scale = data.outputs().iter().map(|y| y * y).sum::<f64>() / data.len() as f64;
    Ok((var, var <= PERFECT_FIT_RTOL * scale.max(f64::MIN_POSITIVE)))
}

/// Geometric grid of truncation levels around `c = 1/(s·σ̂²)`, `σ̂²` being the
/// least-squares residual variance and `s` the configured center scale:
/// `c·ratio^j` for
/// `j = −⌈size/2⌉, …, ⌊size/2⌋ − 1` (that is `−4, …, 3` for the default 8
/// points), increasing. An exact fit yields the single value
/// [`DEGENERATE_ALPHA`].
pub fn alpha_grid(data: &Dataset, config: &MinMaxConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let (var, perfect) = ols_residual_variance(data, config.lambda_ridge)?;
    if perfect {
        return Ok(vec![DEGENERATE_ALPHA]);
    }
    let center = 1.0 / (config.alpha_center_scale * var);
    let size = config.alpha_grid_size as i32;
    let lo = -((size + 1) / 2);
    Ok((lo..lo + size)
        .map(|j| center * crate::math::powf(config.alpha_grid_ratio, j as f64))
        .collect())
}

/// Scans [`alpha_grid`] upward and returns the first result that differs from
/// least squares, or the least-squares result at the largest `α` when none does.
pub fn fit(data: &Dataset, config: &MinMaxConfig) -> Result<EstimatorResult> {
    let grid = alpha_grid(data, config)?;
    if grid.len() == 1 && grid[0] == DEGENERATE_ALPHA {
        let all: Vec<usize> = (0..data.len()).collect();
        let erm = solve_penalized(data, &all, config.lambda_ridge)?;
        return Ok(EstimatorResult {
            theta_hat: erm.clone(),
            active_set: all.clone(),
            trace: vec![TraceStep {
                theta: erm,
                active_set: all,
            }],
            alpha_used: DEGENERATE_ALPHA,
            stopped_at_first_iteration: true,
            final_criterion: None,
        });
    }
    let mut last = None;
    for alpha in grid {
        let res = iterate(data, alpha, config)?;
        if !config.same_params(&res.theta_hat, &res.trace[0].theta) {
            return Ok(res);
        }
        last = Some(res);
    }
    Ok(last.expect("grid has at least one point"))
}
