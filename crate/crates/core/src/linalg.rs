//! Dense real matrices, thin SVD, pseudoinverse and norms.
//!
//! Everything here is a value type: operations take `&DenseMatrix` and return
//! fresh matrices. The matrices in this crate are small (tens of rows), so the
//! SVD is a one-sided Jacobi iteration, which is simple and keeps good
//! relative accuracy on the small singular values that drive pseudoinverse
//! norms.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Default relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

const MAX_JACOBI_SWEEPS: usize = 80;

/// Row-major dense real matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of equal-length rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), ncols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(l);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Largest absolute entrywise difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self * self^T`.
    pub fn gram(&self) -> Self {
        let mut g = Self::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let v: f64 = self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum();
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        g
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Thin SVD `q = u * diag(sigma) * vt`, truncated to the numerical rank.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub vt: DenseMatrix,
    pub rank: usize,
}

impl SvdFactors {
    /// `u * diag(sigma) * vt`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, s) in self.sigma.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.vt).expect("svd factors conform")
    }
}

/// One-sided Jacobi on the columns of `w` (stored as column vectors).
/// Returns the accumulated right rotation, as columns.
fn orthogonalize_columns(w: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
    let q = w.len();
    let mut v: Vec<Vec<f64>> = (0..q)
        .map(|j| {
            let mut e = vec![0.0; q];
            e[j] = 1.0;
            e
        })
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in (i + 1)..q {
                let alpha = dot(&w[i], &w[i]);
                let beta = dot(&w[j], &w[j]);
                let gamma = dot(&w[i], &w[j]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(w, i, j, c, s);
                rotate_pair(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    v
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(j);
    for (a, b) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Thin SVD keeping singular values above `rank_tol * sigma_max`.
pub fn thin_svd(q: &DenseMatrix, rank_tol: f64) -> Result<SvdFactors> {
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::InvalidInput(format!(
            "rank tolerance {rank_tol} must lie in (0, 1)"
        )));
    }
    if q.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let (n, ncols) = (q.rows, q.cols);
    // Orthogonalize whichever side has fewer vectors.
    let wide = ncols > n;
    let mut w: Vec<Vec<f64>> = if wide {
        (0..n).map(|i| q.row(i).to_vec()).collect()
    } else {
        (0..ncols).map(|j| q.column(j)).collect()
    };
    let rot = orthogonalize_columns(&mut w);

    let norms: Vec<f64> = w
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let sigma_max = order.first().map_or(0.0, |&i| norms[i]);
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| sigma_max > 0.0 && norms[i] > rank_tol * sigma_max)
        .collect();
    let rank = kept.len();
    let sigma: Vec<f64> = kept.iter().map(|&i| norms[i]).collect();

    // left: normalized orthogonalized vectors; right: rotation columns.
    let left: Vec<Vec<f64>> = kept
        .iter()
        .map(|&i| w[i].iter().map(|v| v / norms[i]).collect())
        .collect();
    let right: Vec<Vec<f64>> = kept.iter().map(|&i| rot[i].clone()).collect();

    let (u_cols, vt_rows) = if wide { (right, left) } else { (left, right) };
    let u = DenseMatrix::from_columns(n, &u_cols)?;
    let vt = DenseMatrix::from_columns(ncols, &vt_rows)?.transpose();
    Ok(SvdFactors { u, sigma, vt, rank })
}

/// Numerical rank at the given relative tolerance.
pub fn rank(q: &DenseMatrix, rank_tol: f64) -> Result<usize> {
    Ok(thin_svd(q, rank_tol)?.rank)
}

/// Moore-Penrose pseudoinverse `V * Sigma^-1 * U^T`.
pub fn pseudoinverse(q: &DenseMatrix) -> Result<DenseMatrix> {
    pseudoinverse_with_tol(q, DEFAULT_RANK_TOL)
}

pub fn pseudoinverse_with_tol(q: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let svd = thin_svd(q, rank_tol)?;
    let mut v_scaled = svd.vt.transpose();
    for i in 0..v_scaled.rows() {
        for (j, s) in svd.sigma.iter().enumerate() {
            v_scaled[(i, j)] /= s;
        }
    }
    v_scaled.matmul(&svd.u.transpose())
}

/// Squared Frobenius and spectral norms.
pub fn norms_sq(q: &DenseMatrix) -> Result<(f64, f64)> {
    let frobenius_sq = q.data.iter().map(|v| v * v).sum();
    let svd = thin_svd(q, DEFAULT_RANK_TOL)?;
    let spectral_sq = svd.sigma.first().map_or(0.0, |s| s * s);
    Ok((frobenius_sq, spectral_sq))
}

/// Column sub-matrix in the listed order.
pub fn columns(q: &DenseMatrix, subset: &[usize]) -> Result<DenseMatrix> {
    let mut seen = vec![false; q.cols];
    for &j in subset {
        if j >= q.cols {
            return Err(Error::InvalidSubset(format!(
                "column index {j} out of range for {} columns",
                q.cols
            )));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidSubset(format!("duplicate column index {j}")));
        }
    }
    let mut out = DenseMatrix::zeros(q.rows, subset.len());
    for i in 0..q.rows {
        for (c, &j) in subset.iter().enumerate() {
            out[(i, c)] = q[(i, j)];
        }
    }
    Ok(out)
}

/// Horizontal concatenation `[a b]`.
pub fn hcat(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot concatenate {} rows with {} rows",
            a.rows, b.rows
        )));
    }
    let cols = a.cols + b.cols;
    let mut data = Vec::with_capacity(a.rows * cols);
    for i in 0..a.rows {
        data.extend_from_slice(a.row(i));
        data.extend_from_slice(b.row(i));
    }
    Ok(DenseMatrix {
        rows: a.rows,
        cols,
        data,
    })
}

/// `g + y y^T`.
pub fn gram_update(g: &DenseMatrix, y: &[f64]) -> Result<DenseMatrix> {
    if g.rows != g.cols || g.rows != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "gram {}x{} with vector of length {}",
            g.rows,
            g.cols,
            y.len()
        )));
    }
    let mut out = g.clone();
    for i in 0..y.len() {
        for j in 0..y.len() {
            out[(i, j)] += y[i] * y[j];
        }
    }
    Ok(out)
}

/// Eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(s: &DenseMatrix) -> Result<Vec<f64>> {
    if s.rows != s.cols {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a non-square {}x{} matrix",
            s.rows, s.cols
        )));
    }
    let n = s.rows;
    let mut a = s.clone();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= f64::EPSILON * f64::EPSILON * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}
