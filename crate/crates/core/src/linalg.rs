//! Small dense kernels: Householder QR, one-sided Jacobi SVD and the cyclic
//! Jacobi eigensolver. Matrices are row-major `&[f64]` with explicit shape;
//! the problems here have `d` in the tens at most, so clarity wins over
//! blocking.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{dot, sqrt};

const MAX_SWEEPS: usize = 80;

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    /// Eigenvalues, nonincreasing.
    pub values: Vec<f64>,
    /// Eigenvectors stored as rows: `vectors[k*d..(k+1)*d]` pairs with `values[k]`.
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// Relative cutoff below which an eigenvalue counts as zero.
    pub fn cutoff(&self, scale: usize) -> f64 {
        let top = self.values.first().copied().unwrap_or(0.0).max(0.0);
        scale.max(self.dim) as f64 * f64::EPSILON * top
    }

    /// `xᵀ A⁺ x` with eigenvalues at or below `cutoff` treated as zero.
    pub fn pinv_quadratic(&self, x: &[f64], cutoff: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > cutoff)
            .map(|(k, &v)| {
                let p = dot(self.vector(k), x);
                p * p / v
            })
            .sum()
    }
}

/// Cyclic Jacobi eigensolver for a symmetric `d×d` matrix.
pub fn sym_eigen(a: &[f64], d: usize) -> SymEigen {
    assert_eq!(a.len(), d * d, "matrix must be d×d");
    let mut m = a.to_vec();
    // v holds eigenvectors as columns until the final transpose.
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * d + j] * m[i * d + j])
            .sum();
        let diag: f64 = (0..d).map(|i| m[i * d + i] * m[i * d + i]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(1.0 + theta * theta));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = c * vkp - s * vkq;
                    v[k * d + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m[j * d + j].total_cmp(&m[i * d + i]));
    let values = order.iter().map(|&i| m[i * d + i]).collect();
    let mut vectors = vec![0.0; d * d];
    for (row, &col) in order.iter().enumerate() {
        for k in 0..d {
            vectors[row * d + k] = v[k * d + col];
        }
    }
    SymEigen {
        values,
        vectors,
        dim: d,
    }
}

/// Thin singular value decomposition `A = U Σ Vᵀ` of an `m×d` matrix, kept in
/// the factored form the least-squares solver needs.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Singular values, aligned with the columns of `v` (not sorted).
    pub singular: Vec<f64>,
    /// Right singular vectors as columns, row-major `d×d`.
    pub v: Vec<f64>,
    /// `Uᵀ b` for the right-hand side passed at construction.
    pub ut_rhs: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

impl Svd {
    pub fn max_singular(&self) -> f64 {
        self.singular.iter().copied().fold(0.0, f64::max)
    }

    /// Standard pseudo-inverse cutoff `max(m, d)·ε·σ_max`.
    pub fn cutoff(&self) -> f64 {
        self.rows.max(self.cols) as f64 * f64::EPSILON * self.max_singular()
    }

    pub fn rank(&self) -> usize {
        let tol = self.cutoff();
        self.singular.iter().filter(|&&s| s > tol).count()
    }

    /// Minimum-norm least-squares solution `V Σ⁺ Uᵀ b`.
    pub fn solve(&self) -> Vec<f64> {
        let d = self.cols;
        let tol = self.cutoff();
        let mut x = vec![0.0; d];
        for (j, &s) in self.singular.iter().enumerate() {
            if s > tol {
                let coef = self.ut_rhs[j] / s;
                for (k, xk) in x.iter_mut().enumerate() {
                    *xk += self.v[k * d + j] * coef;
                }
            }
        }
        x
    }
}

/// Computes the SVD of the `m×d` row-major matrix `a` together with `Uᵀ b`.
///
/// Tall inputs are first reduced by Householder QR so the Jacobi sweeps run on
/// a `d×d` triangle.
pub fn svd_with_rhs(a: &[f64], b: &[f64], m: usize, d: usize) -> Svd {
    assert_eq!(a.len(), m * d);
    assert_eq!(b.len(), m);
    let (mut work, rhs, p) = if m > d {
        let (r, qtb) = householder_r(a, b, m, d);
        (r, qtb, d)
    } else {
        (a.to_vec(), b.to_vec(), m)
    };
    let mut v = vec![0.0; d * d];
    for i in 0..d {
        v[i * d + i] = 1.0;
    }
    // One-sided Jacobi: rotate columns of `work` until mutually orthogonal.
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..d {
            for j in i + 1..d {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..p {
                    let x = work[r * d + i];
                    let y = work[r * d + j];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = c * t;
                for r in 0..p {
                    let x = work[r * d + i];
                    let y = work[r * d + j];
                    work[r * d + i] = c * x - s * y;
                    work[r * d + j] = s * x + c * y;
                }
                for r in 0..d {
                    let x = v[r * d + i];
                    let y = v[r * d + j];
                    v[r * d + i] = c * x - s * y;
                    v[r * d + j] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut singular = vec![0.0; d];
    let mut ut_rhs = vec![0.0; d];
    for j in 0..d {
        let (mut nrm, mut proj) = (0.0, 0.0);
        for r in 0..p {
            let w = work[r * d + j];
            nrm += w * w;
            proj += w * rhs[r];
        }
        let s = sqrt(nrm);
        singular[j] = s;
        ut_rhs[j] = if s > 0.0 { proj / s } else { 0.0 };
    }
    Svd {
        singular,
        v,
        ut_rhs,
        rows: m,
        cols: d,
    }
}

/// Householder QR of a tall `m×d` matrix; returns the `d×d` factor `R` and the
/// first `d` entries of `Qᵀ b`.
fn householder_r(a: &[f64], b: &[f64], m: usize, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut w = a.to_vec();
    let mut y = b.to_vec();
    let mut h = vec![0.0; m];
    for k in 0..d {
        let mut nrm = 0.0;
        for r in k..m {
            nrm += w[r * d + k] * w[r * d + k];
        }
        let nrm = sqrt(nrm);
        if nrm == 0.0 {
            continue;
        }
        let akk = w[k * d + k];
        let alpha = if akk > 0.0 { -nrm } else { nrm };
        for r in k..m {
            h[r] = w[r * d + k];
        }
        h[k] -= alpha;
        let hh: f64 = h[k..m].iter().map(|x| x * x).sum();
        if hh == 0.0 {
            continue;
        }
        for c in k..d {
            let mut s = 0.0;
            for r in k..m {
                s += h[r] * w[r * d + c];
            }
            let f = 2.0 * s / hh;
            for r in k..m {
                w[r * d + c] -= f * h[r];
            }
        }
        let s = dot(&h[k..m], &y[k..m]);
        let f = 2.0 * s / hh;
        for r in k..m {
            y[r] -= f * h[r];
        }
    }
    let mut r = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            r[i * d + j] = w[i * d + j];
        }
    }
    y.truncate(d);
    (r, y)
}

/// Minimum-norm solution of `min ‖A x − b‖²` for a row-major `m×d` matrix.
pub fn lstsq_min_norm(a: &[f64], b: &[f64], m: usize, d: usize) -> Vec<f64> {
    svd_with_rhs(a, b, m, d).solve()
}
