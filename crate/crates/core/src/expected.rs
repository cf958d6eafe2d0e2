//! Expected characteristic polynomials over column subsets.
//!
//! For an isotropic matrix `Y` (`Y Y^T = I`) with a fixed block `M` of its
//! columns, the leaf polynomial of a subset `S` of the remaining `m` columns is
//! `det[xI - Y_S Y_S^T - M M^T]`. The uniform average of the leaves over all
//! size-`k` supersets of a partial set `T` (|T| = t) has the closed form
//!
//! ```text
//! f_T(x) ∝ (x-1)^{-(m-n-k)} ∂^{k-t} (x-1)^{m-n-t} p_T(x)
//! ```
//!
//! which is what [`IsotropicInstance::expected_poly`] evaluates. Positive
//! prefactors are dropped: every stage is rescaled to be monic, since only
//! root locations matter downstream.

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::poly::{Polynomial, DEFAULT_REM_TOL};

/// Entrywise tolerance on `Y Y^T = I`.
pub const ISOTROPY_TOL: f64 = 1e-8;

const SYMMETRY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-12;

/// Monic characteristic polynomial of a symmetric PSD matrix, built from
/// its eigenvalues.
pub fn charpoly_psd(g: &DenseMatrix) -> Result<Polynomial> {
    Ok(Polynomial::from_roots(&psd_eigenvalues(g)?))
}

/// Ascending eigenvalues of a symmetric PSD matrix, clamped at zero.
fn psd_eigenvalues(g: &DenseMatrix) -> Result<Vec<f64>> {
    if !g.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::InvalidInput(
            "characteristic polynomial needs a symmetric matrix".into(),
        ));
    }
    let scale = g.data().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let eig = linalg::symmetric_eigenvalues(g)?;
    if let Some(&low) = eig.first() {
        if low < -PSD_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "matrix is not positive semidefinite (eigenvalue {low:e})"
            )));
        }
    }
    Ok(eig.into_iter().map(|l| l.max(0.0)).collect())
}

/// An isotropic column set split into a fixed block and `m` selectable
/// columns, together with the sampling budget `k`.
///
/// Selectable columns are addressed by their position `0..m` among the
/// non-fixed columns of `y`, in their original order.
#[derive(Debug, Clone)]
pub struct IsotropicInstance {
    y: DenseMatrix,
    fixed: Vec<usize>,
    free: Vec<usize>,
    free_columns: Vec<Vec<f64>>,
    gram_fixed: DenseMatrix,
    rank_fixed: usize,
    k: usize,
}

impl IsotropicInstance {
    /// Validates `Y Y^T = I` and `n - r <= k <= m - 1`, computing `r` as the
    /// numerical rank of the fixed block.
    pub fn new(y: DenseMatrix, fixed: Vec<usize>, k: usize, rank_tol: f64) -> Result<Self> {
        let m_block = linalg::columns(&y, &fixed)?;
        let r = if fixed.is_empty() {
            0
        } else {
            linalg::rank(&m_block, rank_tol)?
        };
        Self::with_rank(y, fixed, k, r)
    }

    /// Like [`IsotropicInstance::new`] but with a caller-supplied rank of the
    /// fixed block.
    pub fn with_rank(y: DenseMatrix, fixed: Vec<usize>, k: usize, rank_fixed: usize) -> Result<Self> {
        let n = y.rows();
        let m_block = linalg::columns(&y, &fixed)?;
        let yyt = y.gram();
        if yyt.max_abs_diff(&DenseMatrix::identity(n)) > ISOTROPY_TOL {
            return Err(Error::InvalidInput(
                "rows of Y are not orthonormal (Y Y^T != I)".into(),
            ));
        }
        let free: Vec<usize> = (0..y.cols()).filter(|j| !fixed.contains(j)).collect();
        let m = free.len();
        if rank_fixed > n {
            return Err(Error::InvalidInput(format!(
                "fixed block rank {rank_fixed} exceeds {n} rows"
            )));
        }
        if k + rank_fixed < n || k + 1 > m {
            return Err(Error::InvalidInput(format!(
                "k = {k} must satisfy n - r = {} <= k <= m - 1 = {}",
                n - rank_fixed,
                m as i64 - 1
            )));
        }
        let free_columns = free.iter().map(|&j| y.column(j)).collect();
        Ok(Self {
            gram_fixed: m_block.gram(),
            y,
            fixed,
            free,
            free_columns,
            rank_fixed,
            k,
        })
    }

    pub fn y(&self) -> &DenseMatrix {
        &self.y
    }

    /// Column indices of `y` forming the fixed block.
    pub fn fixed_indices(&self) -> &[usize] {
        &self.fixed
    }

    /// Column indices of `y` that are selectable, in order.
    pub fn free_indices(&self) -> &[usize] {
        &self.free
    }

    pub fn n(&self) -> usize {
        self.y.rows()
    }

    pub fn m(&self) -> usize {
        self.free.len()
    }

    pub fn ell(&self) -> usize {
        self.fixed.len()
    }

    pub fn r(&self) -> usize {
        self.rank_fixed
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `M M^T`.
    pub fn gram_fixed(&self) -> &DenseMatrix {
        &self.gram_fixed
    }

    /// The fixed block `M`.
    pub fn fixed_block(&self) -> DenseMatrix {
        linalg::columns(&self.y, &self.fixed).expect("indices validated on construction")
    }

    /// Selectable column `i` (0-based among the selectable columns).
    pub fn free_column(&self, i: usize) -> &[f64] {
        &self.free_columns[i]
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.m()];
        for &s in subset {
            if s >= self.m() {
                return Err(Error::InvalidSubset(format!(
                    "index {s} out of range for {} selectable columns",
                    self.m()
                )));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidSubset(format!("duplicate index {s}")));
            }
        }
        Ok(())
    }

    /// `M M^T + sum_{s in subset} y_s y_s^T`.
    pub fn gram_for(&self, subset: &[usize]) -> Result<DenseMatrix> {
        self.check_subset(subset)?;
        subset.iter().try_fold(self.gram_fixed.clone(), |g, &s| {
            linalg::gram_update(&g, self.free_column(s))
        })
    }

    /// Leaf polynomial `det[xI - Y_S Y_S^T - M M^T]`.
    pub fn leaf_poly(&self, subset: &[usize]) -> Result<Polynomial> {
        charpoly_psd(&self.gram_for(subset)?)
    }

    /// Expected polynomial of a partial assignment of size `j <= k`.
    pub fn expected_poly(&self, partial: &[usize]) -> Result<Polynomial> {
        if partial.len() > self.k {
            return Err(Error::InvalidSubset(format!(
                "partial assignment of size {} exceeds k = {}",
                partial.len(),
                self.k
            )));
        }
        let gram = self.gram_for(partial)?;
        self.expected_poly_from_gram(&gram, partial.len())
    }

    /// Expected polynomial for a partial assignment of size `depth` whose
    /// Gram matrix `M M^T + sum y_s y_s^T` is already known.
    pub fn expected_poly_from_gram(&self, gram: &DenseMatrix, depth: usize) -> Result<Polynomial> {
        if depth > self.k {
            return Err(Error::InvalidInput(format!(
                "depth {depth} exceeds k = {}",
                self.k
            )));
        }
        if gram.rows() != self.n() || gram.cols() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "gram is {}x{}, expected {n}x{n}",
                gram.rows(),
                gram.cols(),
                n = self.n()
            )));
        }
        // In powers of y = x - 1, with p(x) = sum a_j y^j, the operator
        // (x-1)^-(m-n-k) ∂^(k-t) (x-1)^(m-n-t) scales a_j by the falling
        // factorial (j+m-n-t)_(k-t); dividing by the j = n factor keeps it monic.
        let (n, m, t, k) = (self.n(), self.m(), depth, self.k);
        let shifted: Vec<f64> = psd_eigenvalues(gram)?.iter().map(|l| l - 1.0).collect();
        let a = Polynomial::from_roots(&shifted);
        let scale = a.max_abs_coeff();
        let mut b = vec![0.0; n + 1];
        for (j, &aj) in a.coeffs().iter().enumerate() {
            let top = (j + m) as i64 - (n + t) as i64;
            if top < 0 {
                // (x-1)^(n-(m-t)) divides the leaf polynomial when t > m - n
                if aj.abs() > DEFAULT_REM_TOL * scale {
                    return Err(Error::DeflationFailure {
                        remainder: aj.abs(),
                        tolerance: DEFAULT_REM_TOL * scale,
                    });
                }
                continue;
            }
            let weight: f64 = (0..k - t)
                .map(|i| (top - i as i64).max(0) as f64 / (m - t - i) as f64)
                .product();
            b[j] = aj * weight;
        }
        // back to powers of x
        let mut f = Polynomial::constant(b[n]);
        for &bj in b[..n].iter().rev() {
            f = f.mul_shifted_power(1).add(&Polynomial::constant(bj));
        }
        Ok(f.monic())
    }

    /// Residual of the one-step summation identity
    ///
    /// `sum_{i not in S} p_{S+i}(x) = (x-1)^{-(m-n-t-1)} ∂ (x-1)^{m-n-t} p_S(x)`,
    ///
    /// as the largest coefficient difference after dividing both sides by
    /// their common leading coefficient `m - t`.
    pub fn root_sum_identity_check(&self, subset: &[usize]) -> Result<f64> {
        self.check_subset(subset)?;
        let t = subset.len();
        if t >= self.m() {
            return Err(Error::InvalidSubset(
                "identity needs at least one column outside the subset".into(),
            ));
        }
        let mut lhs = Polynomial::zero();
        let mut extended = subset.to_vec();
        for i in (0..self.m()).filter(|i| !subset.contains(i)) {
            extended.push(i);
            lhs = lhs.add(&self.leaf_poly(&extended)?);
            extended.pop();
        }
        let base = self.m() as i64 - self.n() as i64 - t as i64;
        let rhs = self
            .leaf_poly(subset)?
            .shift_power(base, DEFAULT_REM_TOL)?
            .derivative(1)
            .shift_power(-(base - 1), DEFAULT_REM_TOL)?;
        let scale = 1.0 / (self.m() - t) as f64;
        let (lhs, rhs) = (lhs.scale(scale), rhs.scale(scale));
        let len = lhs.coeffs().len().max(rhs.coeffs().len());
        let get = |p: &Polynomial, i: usize| p.coeffs().get(i).copied().unwrap_or(0.0);
        Ok((0..len)
            .map(|i| (get(&lhs, i) - get(&rhs, i)).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::smallest_root;

    fn approx_coeffs(p: &Polynomial, want: &[f64], tol: f64) {
        assert_eq!(p.coeffs().len(), want.len(), "{p:?} vs {want:?}");
        for (a, b) in p.coeffs().iter().zip(want) {
            assert!((a - b).abs() <= tol, "{p:?} vs {want:?}");
        }
    }

    #[test]
    fn charpoly_examples() {
        approx_coeffs(&charpoly_psd(&DenseMatrix::zeros(2, 2)).unwrap(), &[0.0, 0.0, 1.0], 0.0);
        approx_coeffs(
            &charpoly_psd(&DenseMatrix::identity(2)).unwrap(),
            &[1.0, -2.0, 1.0],
            1e-15,
        );
        let g = DenseMatrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        approx_coeffs(&charpoly_psd(&g).unwrap(), &[0.0, -1.0, 1.0], 1e-15);
    }

    #[test]
    fn charpoly_rejects_asymmetric_and_indefinite() {
        let g = DenseMatrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(charpoly_psd(&g), Err(Error::InvalidInput(_))));
        let g = DenseMatrix::from_rows(&[[-1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(charpoly_psd(&g), Err(Error::InvalidInput(_))));
    }

    fn one_by_two(y1: f64) -> IsotropicInstance {
        let y2 = (1.0 - y1 * y1).sqrt();
        let y = DenseMatrix::from_rows(&[[y1, y2]]).unwrap();
        IsotropicInstance::new(y, vec![], 1, 1e-12).unwrap()
    }

    #[test]
    fn expected_poly_single_row() {
        // average of (x - y1^2) and (x - y2^2) with y1^2 + y2^2 = 1
        let inst = one_by_two(0.6);
        let f = inst.expected_poly(&[]).unwrap();
        approx_coeffs(&f, &[-0.5, 1.0], 1e-14);
        assert!((smallest_root(&f, 1e-12).unwrap() - 0.5).abs() < 1e-11);
    }

    #[test]
    fn expected_poly_at_full_depth_is_leaf() {
        let inst = one_by_two(0.6);
        let f = inst.expected_poly(&[1]).unwrap();
        let leaf = inst.leaf_poly(&[1]).unwrap();
        approx_coeffs(&f, leaf.coeffs(), 1e-14);
    }

    #[test]
    fn expected_poly_two_rows_is_leaf_average() {
        // rows of the right factor of a full-rank 2x3 matrix
        let q = DenseMatrix::from_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]]).unwrap();
        let y = linalg::thin_svd(&q, 1e-12).unwrap().vt;
        let inst = IsotropicInstance::new(y, vec![], 2, 1e-12).unwrap();
        let f = inst.expected_poly(&[]).unwrap();
        let leaves = [[0, 1], [0, 2], [1, 2]];
        let mut avg = Polynomial::zero();
        for s in leaves {
            avg = avg.add(&inst.leaf_poly(&s).unwrap().scale(1.0 / 3.0));
        }
        approx_coeffs(&f, avg.coeffs(), 1e-12);
    }

    #[test]
    fn root_sum_identity_small() {
        let inst = one_by_two(0.6);
        assert!(inst.root_sum_identity_check(&[]).unwrap() < 1e-12);
        assert!(inst.root_sum_identity_check(&[0]).unwrap() < 1e-12);
        assert!(inst.root_sum_identity_check(&[0, 1]).is_err());
    }

    #[test]
    fn rejects_bad_budgets_and_subsets() {
        let y = DenseMatrix::from_rows(&[[0.6, 0.8]]).unwrap();
        // k must be at most m - 1
        assert!(IsotropicInstance::new(y.clone(), vec![], 2, 1e-12).is_err());
        // k >= n - r
        assert!(IsotropicInstance::new(y.clone(), vec![], 0, 1e-12).is_err());
        let not_iso = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        assert!(IsotropicInstance::new(not_iso, vec![], 1, 1e-12).is_err());

        let inst = IsotropicInstance::new(y, vec![], 1, 1e-12).unwrap();
        assert!(matches!(inst.gram_for(&[2]), Err(Error::InvalidSubset(_))));
        assert!(matches!(inst.gram_for(&[0, 0]), Err(Error::InvalidSubset(_))));
        assert!(inst.expected_poly(&[0, 1]).is_err());
    }
}
