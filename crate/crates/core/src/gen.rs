//! Seeded random instances for tests, benchmarks and experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, DenseMatrix, DEFAULT_RANK_TOL};
use crate::poly::Polynomial;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent standard normal entries.
pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::new(rows, cols, data).expect("finite gaussian samples")
}

/// An `n x total` matrix with orthonormal rows.
pub fn orthonormal_rows<R: Rng>(rng: &mut R, n: usize, total: usize) -> DenseMatrix {
    assert!(n <= total, "need at least as many columns as rows");
    loop {
        let g = gaussian_matrix(rng, n, total);
        let svd = linalg::thin_svd(&g, DEFAULT_RANK_TOL).expect("finite input");
        if svd.rank == n {
            return svd.vt;
        }
    }
}

/// Fixed block `A` (n×ℓ) and candidate block `B` (n×m).
///
/// With `collinear_fixed`, the last column of `A` duplicates a scaled copy of
/// the first so that `rank(A) = ℓ - 1` (when ℓ >= 2).
pub fn random_blocks<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    ell: usize,
    collinear_fixed: bool,
) -> (DenseMatrix, DenseMatrix) {
    let mut a = gaussian_matrix(rng, n, ell);
    if collinear_fixed && ell >= 2 {
        let factor: f64 = rng.random_range(0.5..2.0);
        for i in 0..n {
            a[(i, ell - 1)] = factor * a[(i, 0)];
        }
    }
    let b = gaussian_matrix(rng, n, m);
    (a, b)
}

/// Monic polynomial with `degree` roots drawn uniformly from `[lo, hi)`,
/// returned with its (sorted) roots.
pub fn random_real_rooted<R: Rng>(rng: &mut R, degree: usize, lo: f64, hi: f64) -> (Vec<f64>, Polynomial) {
    let mut roots: Vec<f64> = (0..degree).map(|_| rng.random_range(lo..hi)).collect();
    roots.sort_by(f64::total_cmp);
    let p = Polynomial::from_roots(&roots);
    (roots, p)
}
