//! Data model, Gram-matrix utilities, and the OLS / ridge baselines.

use alloc::vec::Vec;

use crate::linalg::{self, SymEigen};
use crate::math::{dot, sqrt};
use crate::{Error, Result};

/// `n` feature rows `φ(Xᵢ) ∈ ℝᵈ` paired with outputs `Yᵢ`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    outputs: Vec<f64>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from row-major features (`outputs.len()` rows of `dim`
    /// columns). Requires at least one row, `dim ≥ 1` and finite entries.
    pub fn new(features: Vec<f64>, outputs: Vec<f64>, dim: usize) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::InvalidShape(
                "dataset needs at least one observation",
            ));
        }
        Self::build(features, outputs, dim)
    }

    /// A dataset with no observations, used for prior-only quadrature.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::build(Vec::new(), Vec::new(), dim)
    }

    /// Builds from a slice of rows.
    pub fn from_rows(rows: &[Vec<f64>], outputs: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.len() != outputs.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                found: outputs.len(),
            });
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(rows.concat(), outputs, dim)
    }

    fn build(features: Vec<f64>, outputs: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidShape("feature dimension must be at least 1"));
        }
        if features.len() != outputs.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: outputs.len() * dim,
                found: features.len(),
            });
        }
        if !features.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        if !outputs.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("outputs"));
        }
        Ok(Self {
            features,
            outputs,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.dim)
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn output(&self, i: usize) -> f64 {
        self.outputs[i]
    }

    /// Residual `Yᵢ − ⟨θ, φ(Xᵢ)⟩`.
    pub fn residual(&self, i: usize, theta: &ParamVector) -> f64 {
        self.outputs[i] - dot(self.row(i), theta.as_slice())
    }

    /// Empirical risk `(1/n) Σ (Yᵢ − ⟨θ, φ(Xᵢ)⟩)²`.
    pub fn empirical_risk(&self, theta: &ParamVector) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let r = self.residual(i, theta);
                r * r
            })
            .sum::<f64>()
            / n as f64
    }

    /// Returns a copy with rows reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(self.features.len());
        let mut outputs = Vec::with_capacity(self.len());
        for &i in perm {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                });
            }
            features.extend_from_slice(self.row(i));
            outputs.push(self.outputs[i]);
        }
        Self::build(features, outputs, self.dim)
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        match subset.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            }),
            None => Ok(()),
        }
    }
}

/// Coefficient vector `θ` of the linear predictor `x ↦ ⟨θ, φ(x)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.iter().all(|v| v.is_finite()) {
            Ok(Self(theta))
        } else {
            Err(Error::NonFinite("parameter vector"))
        }
    }

    pub fn zeros(d: usize) -> Self {
        Self(alloc::vec![0.0; d])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sq(&self) -> f64 {
        crate::math::norm_sq(&self.0)
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.norm_sq())
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &ParamVector) -> f64 {
        sqrt(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }
}

impl core::ops::Index<usize> for ParamVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Symmetric PSD `d×d` matrix with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GramInfo {
    matrix: Vec<f64>,
    eigen: SymEigen,
}

impl GramInfo {
    /// Wraps a symmetric PSD matrix (symmetric to 1e-12 relative), clamping
    /// eigenvalues in `[-1e-10, 0)` to zero.
    pub fn from_matrix(matrix: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 || matrix.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: matrix.len(),
            });
        }
        if !matrix.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("gram matrix"));
        }
        let scale = matrix.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..d {
            for j in 0..i {
                if (matrix[i * d + j] - matrix[j * d + i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidShape("gram matrix is not symmetric"));
                }
            }
        }
        let mut eigen = linalg::sym_eigen(&matrix, d);
        for v in eigen.values.iter_mut() {
            if *v < 0.0 {
                if *v >= -1e-10 {
                    *v = 0.0;
                } else {
                    return Err(Error::InvalidShape(
                        "gram matrix is not positive semi-definite",
                    ));
                }
            }
        }
        Ok(Self { matrix, eigen })
    }

    pub fn identity(d: usize) -> Self {
        Self::scaled_identity(d, 1.0)
    }

    pub fn scaled_identity(d: usize, c: f64) -> Self {
        let mut m = alloc::vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = c;
        }
        Self::from_matrix(m, d).expect("scaled identity is PSD")
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim() + j]
    }

    /// Eigenvalues `ν₁ ≥ … ≥ ν_d ≥ 0`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Unit eigenvector for `eigenvalues()[k]`.
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        self.eigen.vector(k)
    }

    pub fn q_max(&self) -> f64 {
        self.eigen.values[0]
    }

    pub fn q_min(&self) -> f64 {
        self.eigen.values[self.dim() - 1]
    }

    pub fn rank(&self) -> usize {
        let cut = self.eigen.cutoff(self.dim());
        self.eigen.values.iter().filter(|&&v| v > cut).count()
    }

    /// `uᵀ Q u`.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|i| u[i] * dot(&self.matrix[i * d..(i + 1) * d], u))
            .sum()
    }

    /// `xᵀ (Q + λI)⁺ x`; zero eigenvalues of `Q + λI` are skipped.
    pub fn inverse_quadratic(&self, x: &[f64], lambda: f64) -> f64 {
        let cut = self.eigen.cutoff(self.dim());
        self.eigen
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v + lambda > cut)
            .map(|(k, &v)| {
                let p = dot(self.eigen.vector(k), x);
                p * p / (v + lambda)
            })
            .sum()
    }
}

/// `Q̂ = (1/n) Σᵢ φ(Xᵢ) φ(Xᵢ)ᵀ` over every row.
pub fn empirical_gram(data: &Dataset) -> GramInfo {
    let all: Vec<usize> = (0..data.len()).collect();
    subset_gram(data, &all)
}

/// Empirical Gram matrix over `subset` (normalized by `|subset|`).
pub(crate) fn subset_gram(data: &Dataset, subset: &[usize]) -> GramInfo {
    let d = data.dim();
    let mut m = alloc::vec![0.0; d * d];
    for &i in subset {
        let x = data.row(i);
        for a in 0..d {
            for b in a..d {
                m[a * d + b] += x[a] * x[b];
            }
        }
    }
    let inv = if subset.is_empty() {
        0.0
    } else {
        1.0 / subset.len() as f64
    };
    for a in 0..d {
        for b in a..d {
            m[a * d + b] *= inv;
            m[b * d + a] = m[a * d + b];
        }
    }
    GramInfo::from_matrix(m, d).expect("sum of outer products is symmetric PSD")
}

/// Minimum-norm least squares on the rows listed in `subset`.
///
/// The result minimizes `Σ_{i∈subset} (⟨θ, φ(Xᵢ)⟩ − Yᵢ)²` and lies in the span
/// of those rows, which is the unique such minimizer when the design is
/// rank-deficient.
pub fn solve_ols(data: &Dataset, subset: &[usize]) -> Result<ParamVector> {
    solve_penalized(data, subset, 0.0)
}

/// Ridge regression on every row: minimizes `(1/n) Σ (⟨θ, φ(Xᵢ)⟩ − Yᵢ)² + λ‖θ‖²`.
pub fn solve_ridge(data: &Dataset, lambda: f64) -> Result<ParamVector> {
    let all: Vec<usize> = (0..data.len()).collect();
    solve_penalized(data, &all, lambda)
}

/// Minimizes `λ‖θ‖² + (1/|I|) Σ_{i∈I} (⟨θ, φ(Xᵢ)⟩ − Yᵢ)²`; `λ = 0` gives the
/// minimum-norm OLS solution.
pub fn solve_penalized(data: &Dataset, subset: &[usize], lambda: f64) -> Result<ParamVector> {
    if !(lambda >= 0.0) {
        return Err(Error::NegativeLambda(lambda));
    }
    data.check_subset(subset)?;
    let d = data.dim();
    let m = subset.len();
    let extra = if lambda > 0.0 { d } else { 0 };
    let rows = m + extra;
    let mut a = Vec::with_capacity(rows * d);
    let mut b = Vec::with_capacity(rows);
    // Scaling by 1/√m turns the averaged objective into a plain sum of squares.
    let w = if lambda > 0.0 {
        1.0 / sqrt(m as f64)
    } else {
        1.0
    };
    for &i in subset {
        a.extend(data.row(i).iter().map(|v| v * w));
        b.push(data.output(i) * w);
    }
    if lambda > 0.0 {
        let s = sqrt(lambda);
        for j in 0..d {
            a.extend((0..d).map(|k| if k == j { s } else { 0.0 }));
            b.push(0.0);
        }
    }
    ParamVector::new(linalg::lstsq_min_norm(&a, &b, rows, d))
}

/// Effective ridge dimension `Σ νᵢ / (νᵢ + λ)` over the nonzero eigenvalues.
///
/// Eigenvalues at or below `len·ε·ν_max` count as zero, the same cutoff as
/// [`GramInfo::rank`], so that the `λ = 0` value is the numerical rank.
pub fn effective_dimension(eigenvalues: &[f64], lambda: f64) -> f64 {
    let top = eigenvalues.iter().copied().fold(0.0, f64::max);
    let cut = eigenvalues.len() as f64 * f64::EPSILON * top;
    eigenvalues
        .iter()
        .filter(|&&v| v > cut)
        .map(|&v| v / (v + lambda))
        .sum()
}
