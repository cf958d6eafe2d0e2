//! Seeded fixtures shared by the benchmarks.

use colsel::{gen, DenseMatrix, Polynomial, SelectionProblem};

/// Gaussian `n × m` candidate block with no fixed columns.
pub fn problem(n: usize, m: usize, k: usize, seed: u64) -> SelectionProblem {
    let mut rng = gen::rng(seed);
    let b = gen::gaussian_matrix(&mut rng, n, m);
    SelectionProblem::without_fixed(b, k, colsel::DEFAULT_EPS).expect("gaussian blocks have full rank")
}

pub fn gaussian(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    gen::gaussian_matrix(&mut gen::rng(seed), rows, cols)
}

/// Monic polynomial with `degree` uniform roots in `[0, 1]`.
pub fn real_rooted(degree: usize, seed: u64) -> Polynomial {
    gen::random_real_rooted(&mut gen::rng(seed), degree, 0.0, 1.0).1
}
