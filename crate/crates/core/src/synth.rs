//! Synthetic benchmark generators with closed-form excess risk.
//!
//! Three designs: independent standard normal covariates (INC), correlated
//! Gaussian covariates with covariance `AAᵀ` (HCC), and a trigonometric basis
//! over a quadratic regression function (TS). In all three the residual
//! `Y − ⟨θ*, φ(X)⟩` is orthogonal to the feature span, so
//! `R(f_θ) − R(f_θ*) = (θ − θ*)ᵀ Q (θ − θ*)` exactly.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::lin::{Dataset, GramInfo, ParamVector};
use crate::math::{cos, powf, sin, sqrt};
use crate::{Error, Result};

/// Default coefficient value of `θ*` for the linear designs.
pub const DEFAULT_THETA: f64 = 10.0;
/// Default noise scale.
pub const DEFAULT_SIGMA: f64 = 10.0;
/// Default tail index of the heavy-tailed noise.
pub const DEFAULT_Q: f64 = 2.01;
/// Mixture settings of the two mixture tables: `(p, ρ)`.
pub const MIXTURE_RHO_01: (f64, f64) = (0.005, 0.1);
pub const MIXTURE_RHO_04: (f64, f64) = (0.005, 0.4);

/// Centered noise `W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Gaussian,
    /// `sign(V)/|V|^{1/q}` with `V ~ N(0, 1)`.
    HeavyTailed {
        q: f64,
    },
    /// `√((1−ρ)/p)` with probability `p`, otherwise Gaussian with the mean and
    /// variance that make the mixture centered with unit variance.
    Mixture {
        p: f64,
        rho: f64,
    },
    /// `W ≡ 0`. Debug hook for exact-fit tests.
    Zero,
}

impl NoiseModel {
    pub fn heavy_tailed(q: f64) -> Result<Self> {
        let m = Self::HeavyTailed { q };
        m.validate()?;
        Ok(m)
    }

    pub fn mixture(p: f64, rho: f64) -> Result<Self> {
        let m = Self::Mixture { p, rho };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Gaussian | Self::Zero => Ok(()),
            Self::HeavyTailed { q } => {
                if q > 2.0 && q.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidNoise("heavy-tailed index q must exceed 2"))
                }
            }
            Self::Mixture { p, rho } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::InvalidNoise("mixture weight p must lie in (0, 1)"));
                }
                if !(rho >= p && rho <= 1.0) {
                    return Err(Error::InvalidNoise(
                        "mixture parameter rho must lie in [p, 1]",
                    ));
                }
                if mixture_gaussian_part(p, rho).1 < 0.0 {
                    return Err(Error::InvalidNoise("mixture Gaussian variance is negative"));
                }
                Ok(())
            }
        }
    }

    /// One draw of `W`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Gaussian => rng.sample(StandardNormal),
            Self::HeavyTailed { q } => {
                let v: f64 = rng.sample(StandardNormal);
                // v = 0 has probability zero; map it to the largest magnitude.
                if v == 0.0 {
                    return f64::MAX;
                }
                v.signum() / powf(v.abs(), 1.0 / q)
            }
            Self::Mixture { p, rho } => {
                if rng.random::<f64>() < p {
                    sqrt((1.0 - rho) / p)
                } else {
                    let (mean, var) = mixture_gaussian_part(p, rho);
                    let z: f64 = rng.sample(StandardNormal);
                    mean + sqrt(var) * z
                }
            }
            Self::Zero => 0.0,
        }
    }
}

/// Mean and variance of the Gaussian component of the mixture noise.
fn mixture_gaussian_part(p: f64, rho: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let mean = -sqrt(p * (1.0 - rho)) / q;
    let var = rho / q - p * (1.0 - rho) / (q * q);
    (mean, var)
}

/// Draws one noise value; see [`NoiseModel::sample`].
pub fn sample_noise<R: Rng + ?Sized>(model: &NoiseModel, rng: &mut R) -> f64 {
    model.sample(rng)
}

/// Conditional mean `E[Y | X = x]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegressionFn {
    /// `⟨θ*, φ(x)⟩`.
    Linear,
    /// `20x² − 10x − 5/3` on `x ∈ [0, 1]`.
    Quadratic,
}

impl RegressionFn {
    /// Value at a raw scalar input; `None` for the linear designs, whose inputs
    /// are the features themselves.
    pub fn eval_scalar(&self, x: f64) -> Option<f64> {
        match self {
            Self::Quadratic => Some(ts_regression(x)),
            Self::Linear => None,
        }
    }
}

/// `20x² − 10x − 5/3`.
pub fn ts_regression(x: f64) -> f64 {
    20.0 * x * x - 10.0 * x - 5.0 / 3.0
}

/// Exact description of the generating distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub theta_star: ParamVector,
    /// Population Gram matrix `Q = E[φ(X)φ(X)ᵀ]`.
    pub gram: GramInfo,
    pub sigma: f64,
    pub regression_fn: RegressionFn,
}

impl GroundTruth {
    /// Exact excess risk `(θ − θ*)ᵀ Q (θ − θ*)`.
    pub fn excess_risk(&self, theta: &ParamVector) -> Result<f64> {
        excess_risk(theta, self)
    }
}

/// Exact excess risk `R(f_θ) − R(f_θ*) = (θ − θ*)ᵀ Q (θ − θ*)`.
pub fn excess_risk(theta: &ParamVector, truth: &GroundTruth) -> Result<f64> {
    let d = truth.theta_star.dim();
    if theta.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: theta.dim(),
        });
    }
    let diff: Vec<f64> = theta
        .as_slice()
        .iter()
        .zip(truth.theta_star.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    Ok(truth.gram.quadratic_form(&diff).max(0.0))
}

/// The three experiment designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Design {
    Inc,
    Hcc,
    Ts,
}

impl Design {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Inc => "INC",
            Self::Hcc => "HCC",
            Self::Ts => "TS",
        }
    }

    /// Draws a training set with the default `θ*` scale.
    pub fn generate<R: Rng + ?Sized>(
        &self,
        n: usize,
        d: usize,
        sigma: f64,
        model: &NoiseModel,
        rng: &mut R,
    ) -> Result<(Dataset, GroundTruth)> {
        match self {
            Self::Inc => gen_inc(n, d, sigma, model, rng),
            Self::Hcc => gen_hcc(n, d, sigma, model, rng),
            Self::Ts => gen_ts(n, d, sigma, model, rng),
        }
    }
}

fn check_sizes(n: usize, d: usize, sigma: f64, model: &NoiseModel) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidShape("generators need n ≥ 1 and d ≥ 1"));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidConfig(
            "noise scale must be nonnegative and finite",
        ));
    }
    model.validate()
}

/// INC(n, d): `X ~ N(0, I_d)`, `θ* = (10, …, 10)`, `Y = ⟨θ*, X⟩ + σW`.
pub fn gen_inc<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    sigma: f64,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<(Dataset, GroundTruth)> {
    gen_inc_with_theta(n, d, DEFAULT_THETA, sigma, model, rng)
}

/// INC design with every coefficient of `θ*` equal to `theta_value`.
pub fn gen_inc_with_theta<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    theta_value: f64,
    sigma: f64,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<(Dataset, GroundTruth)> {
    check_sizes(n, d, sigma, model)?;
    let theta = ParamVector::new(alloc::vec![theta_value; d])?;
    let mut features = Vec::with_capacity(n * d);
    let mut outputs = Vec::with_capacity(n);
    for _ in 0..n {
        let start = features.len();
        features.extend((0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let x = &features[start..];
        outputs.push(theta.predict(x) + sigma * model.sample(rng));
    }
    let truth = GroundTruth {
        theta_star: theta,
        gram: GramInfo::identity(d),
        sigma,
        regression_fn: RegressionFn::Linear,
    };
    Ok((Dataset::new(features, outputs, d)?, truth))
}

/// HCC(n, d): `X = A z` with `z ~ N(0, I_d)` and `A` a fresh `d×d` matrix of
/// `U[0, 1]` entries, so `Q = AAᵀ`.
pub fn gen_hcc<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    sigma: f64,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<(Dataset, GroundTruth)> {
    check_sizes(n, d, sigma, model)?;
    let a: Vec<f64> = (0..d * d).map(|_| rng.random::<f64>()).collect();
    let mut q = alloc::vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            q[i * d + j] = (0..d).map(|k| a[i * d + k] * a[j * d + k]).sum();
        }
    }
    let theta = ParamVector::new(alloc::vec![DEFAULT_THETA; d])?;
    let mut features = Vec::with_capacity(n * d);
    let mut outputs = Vec::with_capacity(n);
    let mut z = alloc::vec![0.0; d];
    for _ in 0..n {
        for zk in z.iter_mut() {
            *zk = rng.sample(StandardNormal);
        }
        let start = features.len();
        features.extend((0..d).map(|i| (0..d).map(|k| a[i * d + k] * z[k]).sum::<f64>()));
        let x = &features[start..];
        outputs.push(theta.predict(x) + sigma * model.sample(rng));
    }
    let truth = GroundTruth {
        theta_star: theta,
        gram: GramInfo::from_matrix(q, d)?,
        sigma,
        regression_fn: RegressionFn::Linear,
    };
    Ok((Dataset::new(features, outputs, d)?, truth))
}

/// Trigonometric features `(cos 2πx, …, cos dπx, sin 2πx, …, sin dπx)` for even `d`.
pub fn ts_features(x: f64, d: usize) -> Vec<f64> {
    let half = d / 2;
    let mut phi = Vec::with_capacity(d);
    phi.extend((1..=half).map(|k| cos(2.0 * PI * k as f64 * x)));
    phi.extend((1..=half).map(|k| sin(2.0 * PI * k as f64 * x)));
    phi
}

/// Fourier coefficients of `20x² − 10x − 5/3` on the first `d` basis functions:
/// `20/(π²k²)` for the cosines and `−10/(πk)` for the sines, `k = 1…d/2`.
pub fn ts_theta_star(d: usize) -> Vec<f64> {
    let half = d / 2;
    let mut t = Vec::with_capacity(d);
    t.extend((1..=half).map(|k| 20.0 / (PI * PI * (k * k) as f64)));
    t.extend((1..=half).map(|k| -10.0 / (PI * k as f64)));
    t
}

/// Recovers the raw input `x ∈ [0, 1)` from a TS feature row.
pub fn ts_input_from_features(phi: &[f64]) -> f64 {
    let half = phi.len() / 2;
    let x = libm::atan2(phi[half], phi[0]) / (2.0 * PI);
    if x < 0.0 {
        x + 1.0
    } else {
        x
    }
}

/// TS(n, d): `X ~ U[0, 1]`, `Y = 20X² − 10X − 5/3 + σW`, trigonometric
/// features, `Q = ½ I`.
pub fn gen_ts<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    sigma: f64,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<(Dataset, GroundTruth)> {
    if d % 2 != 0 {
        return Err(Error::OddDimension(d));
    }
    check_sizes(n, d, sigma, model)?;
    let mut features = Vec::with_capacity(n * d);
    let mut outputs = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.random();
        features.extend(ts_features(x, d));
        outputs.push(ts_regression(x) + sigma * model.sample(rng));
    }
    let truth = GroundTruth {
        theta_star: ParamVector::new(ts_theta_star(d))?,
        gram: GramInfo::scaled_identity(d, 0.5),
        sigma,
        regression_fn: RegressionFn::Quadratic,
    };
    Ok((Dataset::new(features, outputs, d)?, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ts_coefficients() {
        let t = ts_theta_star(2);
        assert!((t[0] - 2.026_423_672_846_756).abs() < 1e-12);
        assert!((t[1] + 3.183_098_861_837_907).abs() < 1e-12);
        let t6 = ts_theta_star(6);
        assert!((t6[2] - 20.0 / (PI * PI * 9.0)).abs() < 1e-15);
        assert!((t6[5] + 10.0 / (3.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn ts_rejects_odd_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            gen_ts(5, 3, 1.0, &NoiseModel::Gaussian, &mut rng).unwrap_err(),
            Error::OddDimension(3)
        );
    }

    #[test]
    fn ts_input_roundtrip() {
        for x in [0.0, 0.1, 0.49, 0.5, 0.77, 0.999] {
            let back = ts_input_from_features(&ts_features(x, 4));
            assert!((back - x).abs() < 1e-12, "{x} -> {back}");
        }
    }

    #[test]
    fn inc_zero_noise_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (data, truth) = gen_inc(50, 1, 10.0, &NoiseModel::Zero, &mut rng).unwrap();
        for (x, y) in data.rows().zip(data.outputs()) {
            assert_eq!(*y, 10.0 * x[0]);
        }
        assert_eq!(truth.theta_star.as_slice(), &[10.0]);
        assert_eq!(truth.sigma, 10.0);
    }

    #[test]
    fn excess_risk_examples() {
        let truth = GroundTruth {
            theta_star: ParamVector::new(alloc::vec![10.0, 10.0]).unwrap(),
            gram: GramInfo::identity(2),
            sigma: 10.0,
            regression_fn: RegressionFn::Linear,
        };
        assert_eq!(excess_risk(&truth.theta_star, &truth).unwrap(), 0.0);
        let e1 = ParamVector::new(alloc::vec![11.0, 10.0]).unwrap();
        assert_eq!(excess_risk(&e1, &truth).unwrap(), 1.0);
        assert!(excess_risk(&ParamVector::zeros(3), &truth).is_err());
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel::heavy_tailed(2.0).is_err());
        assert!(NoiseModel::heavy_tailed(DEFAULT_Q).is_ok());
        assert!(NoiseModel::mixture(0.0, 0.5).is_err());
        assert!(NoiseModel::mixture(0.5, 0.1).is_err());
        assert!(NoiseModel::mixture(MIXTURE_RHO_01.0, MIXTURE_RHO_01.1).is_ok());
        assert!(NoiseModel::mixture(MIXTURE_RHO_04.0, MIXTURE_RHO_04.1).is_ok());
    }

    #[test]
    fn generators_are_deterministic() {
        for design in [Design::Inc, Design::Hcc, Design::Ts] {
            let m = NoiseModel::heavy_tailed(DEFAULT_Q).unwrap();
            let a = design
                .generate(30, 2, 10.0, &m, &mut ChaCha8Rng::seed_from_u64(9))
                .unwrap();
            let b = design
                .generate(30, 2, 10.0, &m, &mut ChaCha8Rng::seed_from_u64(9))
                .unwrap();
            assert_eq!(a, b);
        }
    }
}
