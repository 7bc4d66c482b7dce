//! Plug-in estimates of the distribution constants that enter the min-max
//! risk bound, and evaluation of that bound and its truncation level.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::lin::{effective_dimension, empirical_gram, Dataset, ParamVector};
use crate::math::{dot, ln, sqrt};
use crate::{Error, Result};

/// Numerical constant `c` of the sample-size condition `n > cκχD`.
pub const BOUND_C: f64 = 380.0;
/// Numerical constant `c′` of the second-order term.
pub const BOUND_C_PRIME: f64 = 6044.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentConstants {
    /// `√R(f̃)`: root mean squared residual of the reference fit.
    pub sigma: f64,
    /// Kurtosis of the design, `sup_u √E⟨u,φ⟩⁴ / E⟨u,φ⟩²`.
    pub chi: f64,
    /// `√E[(φᵀQ_λ⁻¹φ)²] / E[φᵀQ_λ⁻¹φ]`.
    pub kappa: f64,
    /// Kurtosis of the residual, `√E[ε⁴] / E[ε²]`.
    pub kappa_prime: f64,
    /// Effective ridge dimension `D`.
    pub eff_dim: f64,
    /// `max_{θ,θ′∈Θ} √(λ‖θ−θ′‖² + E⟨θ−θ′, φ⟩²)`.
    pub diameter_t: f64,
}

/// `√Ê⟨u,φ⟩⁴ / Ê⟨u,φ⟩²` for one direction, with `0/0 = 0`.
pub fn direction_kurtosis(data: &Dataset, u: &[f64]) -> f64 {
    let n = data.len() as f64;
    let (mut m2, mut m4) = (0.0, 0.0);
    for x in data.rows() {
        let p = dot(u, x);
        let p2 = p * p;
        m2 += p2;
        m4 += p2 * p2;
    }
    let (m2, m4) = (m2 / n, m4 / n);
    if m2 == 0.0 {
        0.0
    } else {
        sqrt(m4) / m2
    }
}

/// Candidate directions for the `χ` supremum: the Gram eigenvectors followed
/// by `n_random` uniform unit vectors.
pub fn chi_directions<R: Rng + ?Sized>(
    data: &Dataset,
    n_random: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let gram = empirical_gram(data);
    let d = data.dim();
    let mut dirs: Vec<Vec<f64>> = (0..d).map(|k| gram.eigenvector(k).to_vec()).collect();
    while dirs.len() < d + n_random {
        let v: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let nrm = sqrt(dot(&v, &v));
        if nrm > 0.0 {
            dirs.push(v.into_iter().map(|c| c / nrm).collect());
        }
    }
    dirs
}

/// Plug-in constants around the reference parameter `theta_ref`.
///
/// `χ` is a maximum over finitely many directions, hence a lower estimate of
/// the true supremum. `T` is computed for `Θ` a Euclidean ball of radius
/// `theta_radius` under the empirical Gram metric.
pub fn estimate_constants<R: Rng + ?Sized>(
    data: &Dataset,
    theta_ref: &ParamVector,
    lambda: f64,
    theta_radius: f64,
    n_directions: usize,
    rng: &mut R,
) -> Result<MomentConstants> {
    if n_directions == 0 {
        return Err(Error::InvalidConfig("need at least one random direction"));
    }
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    if !(theta_radius >= 0.0) || !theta_radius.is_finite() {
        return Err(Error::InvalidConfig("parameter radius must be nonnegative"));
    }
    if theta_ref.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: theta_ref.dim(),
        });
    }
    if data.is_empty() {
        return Err(Error::Degenerate("no observations"));
    }
    let n = data.len() as f64;
    let gram = empirical_gram(data);
    if gram.q_max() <= 0.0 {
        return Err(Error::Degenerate("all features are zero"));
    }

    let (mut e2, mut e4) = (0.0, 0.0);
    for i in 0..data.len() {
        let r = data.residual(i, theta_ref);
        e2 += r * r;
        e4 += r * r * r * r;
    }
    let (e2, e4) = (e2 / n, e4 / n);
    if e2 <= 0.0 {
        return Err(Error::Degenerate("zero residuals: kappa' is undefined"));
    }
    let sigma = sqrt(e2);
    let kappa_prime = sqrt(e4) / e2;

    let (mut v1, mut v2) = (0.0, 0.0);
    for x in data.rows() {
        let v = gram.inverse_quadratic(x, lambda);
        v1 += v;
        v2 += v * v;
    }
    let (v1, v2) = (v1 / n, v2 / n);
    let kappa = sqrt(v2) / v1;

    let chi = chi_directions(data, n_directions, rng)
        .iter()
        .map(|u| direction_kurtosis(data, u))
        .fold(0.0, f64::max);

    let eff_dim = effective_dimension(gram.eigenvalues(), lambda);
    let diameter_t = 2.0 * theta_radius * sqrt(lambda + gram.q_max());

    Ok(MomentConstants {
        sigma,
        chi,
        kappa,
        kappa_prime,
        eff_dim,
        diameter_t,
    })
}

fn threshold(c: &MomentConstants) -> f64 {
    BOUND_C * c.kappa * c.chi * c.eff_dim
}

fn check_n(c: &MomentConstants, n: usize) -> Result<f64> {
    let t = threshold(c);
    if (n as f64) <= t {
        return Err(Error::SampleTooSmall { n, threshold: t });
    }
    Ok(1.0 - t / n as f64)
}

fn scale_term(c: &MomentConstants) -> f64 {
    let s = 2.0 * sqrt(c.kappa_prime) * c.sigma + sqrt(c.chi) * c.diameter_t;
    s * s
}

/// Truncation level `α = (1 − cκχD/n) / (2χ[2√κ′σ + √χT]²)`.
pub fn guaranteed_alpha(constants: &MomentConstants, n: usize) -> Result<f64> {
    let shrink = check_n(constants, n)?;
    Ok(shrink / (2.0 * constants.chi * scale_term(constants)))
}

/// Excess-risk bound of the min-max estimator at confidence `1 − ε`, with the
/// optimization gap taken as zero.
pub fn excess_risk_bound(constants: &MomentConstants, n: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let shrink = check_n(constants, n)?;
    let c = constants;
    let nf = n as f64;
    let first = BOUND_C * c.kappa * c.kappa_prime * c.eff_dim * c.sigma * c.sigma / nf;
    let dev = ln(1.0 / epsilon) / nf
        + BOUND_C_PRIME * c.kappa * c.kappa * c.eff_dim * c.eff_dim / (nf * nf);
    Ok(first + 8.0 * c.chi * dev * scale_term(c) / shrink)
}
