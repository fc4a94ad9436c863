//! Principal component analysis via cyclic Jacobi on the sample covariance.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::tensor::Matrix;
use crate::{Error, Result};

/// Off-diagonal tolerance, relative to the covariance trace.
pub const JACOBI_TOLERANCE: f64 = 1e-9;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Unsorted eigenvalues, in the order of `vectors`.
    pub values: Vec<f64>,
    /// Row-major `n×n`; row `i` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

/// Cyclic Jacobi rotations until every off-diagonal entry is at most
/// `JACOBI_TOLERANCE · trace` in magnitude. `a` is row-major `n×n`, assumed
/// symmetric, and is destroyed.
pub fn jacobi_eigen(a: &mut [f64], n: usize) -> SymmetricEigen {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    // eigenvectors are kept as rows so rotation updates stay contiguous
    let mut vt = vec![0.0f64; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    let trace: f64 = (0..n).map(|i| a[i * n + i].abs()).sum();
    let tol = JACOBI_TOLERANCE * trace;

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol {
                    continue;
                }
                rotate(a, &mut vt, n, p, q);
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    SymmetricEigen {
        values,
        vectors: vt,
        sweeps,
    }
}

/// Annihilates `a[p][q]` with one Jacobi rotation.
fn rotate(a: &mut [f64], vt: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let tau = s / (1.0 + c);

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let g = a[p * n + r];
        let h = a[q * n + r];
        let new_p = g - s * (h + g * tau);
        let new_q = h + s * (g - h * tau);
        a[p * n + r] = new_p;
        a[r * n + p] = new_p;
        a[q * n + r] = new_q;
        a[r * n + q] = new_q;
    }
    let (lo, hi) = vt.split_at_mut(q * n);
    let vp = &mut lo[p * n..(p + 1) * n];
    let vq = &mut hi[..n];
    for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
        let g = *x;
        let h = *y;
        *x = g - s * (h + g * tau);
        *y = h + s * (g - h * tau);
    }
}

/// Fitted PCA: mean row, orthonormal components as columns (descending
/// eigenvalue), and the clamped non-negative eigenvalues.
#[derive(Debug, Clone)]
pub struct PcaModel {
    mean: Matrix,
    components: Matrix,
    eigenvalues: Vec<f64>,
    sweeps: usize,
}

/// Column means in f64.
fn column_means(data: &Matrix) -> Vec<f64> {
    let mut mean = vec![0.0f64; data.cols()];
    for r in 0..data.rows() {
        for (m, &v) in mean.iter_mut().zip(data.row(r)) {
            *m += v as f64;
        }
    }
    let n = data.rows() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Sample covariance (divisor n − 1), row-major `d×d`.
pub fn covariance(data: &Matrix) -> Vec<f64> {
    let d = data.cols();
    let mean = column_means(data);
    let mut cov = vec![0.0f64; d * d];
    let mut centered = vec![0.0f64; d];
    for r in 0..data.rows() {
        for ((c, &v), &m) in centered.iter_mut().zip(data.row(r)).zip(&mean) {
            *c = v as f64 - m;
        }
        for i in 0..d {
            let xi = centered[i];
            if xi == 0.0 {
                continue;
            }
            let row = &mut cov[i * d + i..(i + 1) * d];
            for (c, &xj) in row.iter_mut().zip(&centered[i..]) {
                *c += xi * xj;
            }
        }
    }
    let denom = (data.rows() - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    cov
}

impl PcaModel {
    pub fn fit(data: &Matrix) -> Result<Self> {
        if data.rows() < 2 {
            return Err(Error::Config(format!("PCA needs at least 2 rows, got {}", data.rows())));
        }
        let d = data.cols();
        let mean = column_means(data);
        let mut cov = covariance(data);
        let eig = jacobi_eigen(&mut cov, d);

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]));

        let mut components = Matrix::zeros(d, d);
        let mut eigenvalues = Vec::with_capacity(d);
        for (col, &src) in order.iter().enumerate() {
            let v = &eig.vectors[src * d..(src + 1) * d];
            // largest-magnitude entry (first on ties) is made positive
            let pivot = v
                .iter()
                .enumerate()
                .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
            let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
            for (row, &x) in v.iter().enumerate() {
                components.set(row, col, (sign * x) as f32);
            }
            eigenvalues.push(eig.values[src].max(0.0));
        }

        let mean = Matrix::new(1, d, mean.into_iter().map(|m| m as f32).collect())?;
        Ok(Self {
            mean,
            components,
            eigenvalues,
            sweeps: eig.sweeps,
        })
    }

    /// Jacobi sweeps the eigensolver needed.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn dim(&self) -> usize {
        self.mean.cols()
    }

    pub fn mean(&self) -> &Matrix {
        &self.mean
    }

    /// `d×d`, column `i` is the i-th principal direction.
    pub fn components(&self) -> &Matrix {
        &self.components
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.dim() {
            return Err(Error::Range(format!("k = {k} outside 1..={}", self.dim())));
        }
        Ok(())
    }

    /// First `k` components as a `d×k` matrix.
    fn leading(&self, k: usize) -> Matrix {
        let d = self.dim();
        let mut out = Matrix::zeros(d, k);
        for r in 0..d {
            out.row_mut(r).copy_from_slice(&self.components.row(r)[..k]);
        }
        out
    }

    /// Projects centered rows onto the first `k` components (`n×k`).
    pub fn transform(&self, data: &Matrix, k: usize) -> Result<Matrix> {
        self.check_k(k)?;
        if data.cols() != self.dim() {
            return Err(Error::shape("transform", data.shape(), self.mean.shape()));
        }
        let centered = data.sub(&self.broadcast_mean(data.rows()))?;
        centered.matmul(&self.leading(k))
    }

    /// `coords · leadingᵀ + mean` for `n×k` coordinates.
    pub fn inverse_transform(&self, coords: &Matrix) -> Result<Matrix> {
        let k = coords.cols();
        self.check_k(k)?;
        coords.affine(&self.leading(k).transpose(), &self.mean)
    }

    fn broadcast_mean(&self, rows: usize) -> Matrix {
        Matrix::zeros(rows, self.dim())
            .add_row_broadcast(&self.mean)
            .expect("mean width matches")
    }

    /// Mean squared per-element error of the rank-`k` reconstruction.
    pub fn reconstruction_mse(&self, data: &Matrix, k: usize) -> Result<f64> {
        let recon = self.inverse_transform(&self.transform(data, k)?)?;
        let se: f64 = recon
            .as_slice()
            .iter()
            .zip(data.as_slice())
            .map(|(&a, &b)| {
                let e = a as f64 - b as f64;
                e * e
            })
            .sum();
        Ok(se / data.len() as f64)
    }

    pub fn explained_variance_report(&self) -> VarianceReport {
        VarianceReport::from_eigenvalues(&self.eigenvalues)
    }
}

/// Per-component explained variance and the top-versus-tail dominance ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceReport {
    pub eigenvalues: Vec<f64>,
    pub ratios: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Components counted as the "top 10%": `max(1, d / 10)`.
    pub top_count: usize,
    /// Mean eigenvalue of the top components divided by the mean eigenvalue
    /// of the rest. Infinite if the tail is all zero.
    pub dominance: f64,
}

impl VarianceReport {
    pub fn from_eigenvalues(eigenvalues: &[f64]) -> Self {
        let total: f64 = eigenvalues.iter().sum();
        let ratios: Vec<f64> = if total > 0.0 {
            eigenvalues.iter().map(|&l| l / total).collect()
        } else {
            vec![0.0; eigenvalues.len()]
        };
        let mut running = 0.0;
        let cumulative = ratios
            .iter()
            .map(|r| {
                running += r;
                running
            })
            .collect();
        let d = eigenvalues.len();
        let top_count = (d / 10).max(1).min(d);
        let top = &eigenvalues[..top_count];
        let tail = &eigenvalues[top_count..];
        let top_mean = top.iter().sum::<f64>() / top.len().max(1) as f64;
        let dominance = if tail.is_empty() {
            f64::INFINITY
        } else {
            let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
            if tail_mean > 0.0 {
                top_mean / tail_mean
            } else {
                f64::INFINITY
            }
        };
        Self {
            eigenvalues: eigenvalues.to_vec(),
            ratios,
            cumulative,
            top_count,
            dominance,
        }
    }
}
