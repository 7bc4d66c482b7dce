//! Truncated Gibbs posterior over a bounded parameter box, realized by
//! midpoint quadrature for small `d`.
//!
//! With a uniform prior on the box and `Wᵢ(θ, θ′) = λ{[Yᵢ − f_θ(Xᵢ)]² − [Yᵢ − f_θ′(Xᵢ)]²}`,
//! the energy is `Ê(θ) = log ∫ π(dθ′) / ∏ᵢ (1 − Wᵢ + Wᵢ²/2)` and the posterior
//! density is proportional to `exp(−Ê)`. Every product is accumulated as a sum
//! of logs and every normalization goes through log-sum-exp.

use alloc::vec::Vec;

use rand::Rng;

use crate::lin::{Dataset, ParamVector};
use crate::math::{exp, ln, logsumexp};
use crate::{Error, Result};

/// Upper bound on `d · grid^d`.
pub const MAX_GRID_WORK: usize = 1_000_000;

/// Prior box, quadrature resolution and temperature `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsSpec {
    bounds: Vec<(f64, f64)>,
    grid_points_per_dim: usize,
    lambda: f64,
}

impl GibbsSpec {
    pub fn new(bounds: Vec<(f64, f64)>, grid_points_per_dim: usize, lambda: f64) -> Result<Self> {
        let d = bounds.len();
        if d == 0 {
            return Err(Error::InvalidGrid("box needs at least one coordinate"));
        }
        if bounds
            .iter()
            .any(|&(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::InvalidGrid("each coordinate needs finite lo < hi"));
        }
        if grid_points_per_dim < 3 {
            return Err(Error::InvalidGrid("at least 3 grid points per dimension"));
        }
        let work = (grid_points_per_dim as u128)
            .checked_pow(d as u32)
            .and_then(|g| g.checked_mul(d as u128));
        if work.is_none_or(|w| w > MAX_GRID_WORK as u128) {
            return Err(Error::InvalidGrid("grid too large (d·grid^d > 10⁶)"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidGrid("lambda must be positive"));
        }
        Ok(Self {
            bounds,
            grid_points_per_dim,
            lambda,
        })
    }

    /// Same box `[lo, hi]` on every coordinate with the default resolution
    /// (201 points for `d = 1`, 61 for `d = 2`, 21 beyond).
    pub fn cube(d: usize, lo: f64, hi: f64, lambda: f64) -> Result<Self> {
        let grid = match d {
            1 => 201,
            2 => 61,
            _ => 21,
        };
        Self::new(alloc::vec![(lo, hi); d], grid, lambda)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn grid_points_per_dim(&self) -> usize {
        self.grid_points_per_dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Cell width along coordinate `k`.
    pub fn step(&self, k: usize) -> f64 {
        let (lo, hi) = self.bounds[k];
        (hi - lo) / self.grid_points_per_dim as f64
    }

    /// Cell midpoints in row-major order, last coordinate fastest.
    pub fn grid(&self) -> Vec<ParamVector> {
        let d = self.dim();
        let m = self.grid_points_per_dim;
        let total = m.pow(d as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = alloc::vec![0usize; d];
        for _ in 0..total {
            let theta = (0..d)
                .map(|k| self.bounds[k].0 + (idx[k] as f64 + 0.5) * self.step(k))
                .collect();
            out.push(ParamVector::new(theta).expect("grid points are finite"));
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }

    fn check_inside(&self, theta: &ParamVector) -> Result<()> {
        if theta.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: theta.dim(),
            });
        }
        match (0..self.dim()).find(|&k| {
            let (lo, hi) = self.bounds[k];
            !(theta[k] >= lo && theta[k] <= hi)
        }) {
            Some(k) => Err(Error::OutsideBox(k)),
            None => Ok(()),
        }
    }
}

/// Posterior weights over the quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsPosterior {
    pub grid_thetas: Vec<ParamVector>,
    /// Normalized so that `logsumexp(log_weights) = 0`.
    pub log_weights: Vec<f64>,
}

impl GibbsPosterior {
    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|&l| exp(l)).collect()
    }

    /// Index of the largest weight.
    pub fn mode_index(&self) -> usize {
        self.log_weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("posterior has at least one node")
    }

    pub fn mode(&self) -> &ParamVector {
        &self.grid_thetas[self.mode_index()]
    }

    /// Posterior-weighted average of the grid parameters.
    pub fn mean(&self) -> ParamVector {
        let d = self.grid_thetas[0].dim();
        let mut m = alloc::vec![0.0; d];
        for (theta, &lw) in self.grid_thetas.iter().zip(&self.log_weights) {
            let w = exp(lw);
            for (mk, tk) in m.iter_mut().zip(theta.as_slice()) {
                *mk += w * tk;
            }
        }
        ParamVector::new(m).expect("weighted mean of finite points is finite")
    }
}

/// Squared losses of every grid node, `losses[node][i]`.
fn loss_table(grid: &[ParamVector], data: &Dataset) -> Vec<Vec<f64>> {
    grid.iter()
        .map(|theta| {
            (0..data.len())
                .map(|i| {
                    let r = data.residual(i, theta);
                    r * r
                })
                .collect()
        })
        .collect()
}

/// `−Σᵢ log(1 − Wᵢ + Wᵢ²/2)` given both loss vectors.
fn log_inverse_product(lambda: f64, loss: &[f64], loss_prime: &[f64]) -> f64 {
    -loss
        .iter()
        .zip(loss_prime)
        .map(|(a, b)| {
            let w = lambda * (a - b);
            ln(1.0 - w + 0.5 * w * w)
        })
        .sum::<f64>()
}

fn energy_from_losses(lambda: f64, loss: &[f64], table: &[Vec<f64>]) -> f64 {
    let terms: Vec<f64> = table
        .iter()
        .map(|lp| log_inverse_product(lambda, loss, lp))
        .collect();
    logsumexp(&terms) - ln(table.len() as f64)
}

/// `Ê(θ)` with the integral over `θ′` replaced by the grid average.
pub fn energy(theta: &ParamVector, data: &Dataset, spec: &GibbsSpec) -> Result<f64> {
    spec.check_inside(theta)?;
    check_data(data, spec)?;
    let table = loss_table(&spec.grid(), data);
    let own = loss_table(core::slice::from_ref(theta), data).remove(0);
    Ok(energy_from_losses(spec.lambda, &own, &table))
}

fn check_data(data: &Dataset, spec: &GibbsSpec) -> Result<()> {
    if data.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: data.dim(),
        });
    }
    Ok(())
}

/// Per-node energies over the whole grid.
pub fn grid_energies(data: &Dataset, spec: &GibbsSpec) -> Result<(Vec<ParamVector>, Vec<f64>)> {
    check_data(data, spec)?;
    let grid = spec.grid();
    let table = loss_table(&grid, data);
    let energies = table
        .iter()
        .map(|loss| energy_from_losses(spec.lambda, loss, &table))
        .collect();
    Ok((grid, energies))
}

/// Normalizes `−energy` into log-weights; invariant to adding a constant to
/// every energy.
pub fn normalize_energies(energies: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = energies.iter().map(|e| -e).collect();
    let z = logsumexp(&neg);
    neg.iter().map(|l| l - z).collect()
}

/// Posterior `π̂ ∝ exp(−Ê)` over the grid nodes.
pub fn posterior(data: &Dataset, spec: &GibbsSpec) -> Result<GibbsPosterior> {
    let (grid_thetas, energies) = grid_energies(data, spec)?;
    Ok(GibbsPosterior {
        grid_thetas,
        log_weights: normalize_energies(&energies),
    })
}

/// Samples a grid node with the posterior weights.
pub fn draw<R: Rng + ?Sized>(posterior: &GibbsPosterior, rng: &mut R) -> ParamVector {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (theta, &lw) in posterior.grid_thetas.iter().zip(&posterior.log_weights) {
        acc += exp(lw);
        if u < acc {
            return theta.clone();
        }
    }
    // Rounding can leave the cumulative sum just below 1.
    let last = posterior
        .log_weights
        .iter()
        .rposition(|&lw| lw > f64::NEG_INFINITY)
        .unwrap_or(posterior.grid_thetas.len() - 1);
    posterior.grid_thetas[last].clone()
}

/// `0.32 / (2σ + H)²`.
pub fn default_lambda(sigma: f64, h: f64) -> f64 {
    let s = 2.0 * sigma + h;
    0.32 / (s * s)
}
