#![allow(dead_code)]

use colsel::gen;
use colsel::{DenseMatrix, IsotropicInstance, SelectionProblem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random `(A, B)` pair together with the rank of `A`.
pub struct RandomBlocks {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub r: usize,
}

impl RandomBlocks {
    pub fn valid_ks(&self) -> std::ops::RangeInclusive<usize> {
        (self.n - self.r)..=(self.m - 1)
    }

    pub fn problem(&self, k: usize, eps: f64) -> SelectionProblem {
        SelectionProblem::new(self.a.clone(), self.b.clone(), k, eps)
            .unwrap_or_else(|e| panic!("seed {} k {k}: {e}", self.seed))
    }
}

/// `n ∈ {2,3,4}`, `m ∈ {n+2, .., max_m}`, `ℓ ∈ {0,1,2}`; a quarter of the
/// two-column fixed blocks are rank one.
pub fn random_blocks(seed: u64, max_m: usize) -> RandomBlocks {
    let mut rng = gen::rng(seed);
    let n = rng.random_range(2..=4);
    let m = rng.random_range((n + 2)..=max_m);
    let ell = rng.random_range(0..=2);
    let collinear = ell == 2 && rng.random_bool(0.25);
    let (a, b) = gen::random_blocks(&mut rng, n, m, ell, collinear);
    let r = if collinear { ell - 1 } else { ell };
    RandomBlocks {
        seed,
        n,
        m,
        ell,
        a,
        b,
        r,
    }
}

/// Random isotropic instance with `ℓ` fixed leading columns.
pub fn random_isotropic(rng: &mut ChaCha8Rng, n: usize, m: usize, ell: usize, k: usize) -> IsotropicInstance {
    let y = gen::orthonormal_rows(rng, n, m + ell);
    IsotropicInstance::new(y, (0..ell).collect(), k, colsel::DEFAULT_RANK_TOL).unwrap()
}

/// Random subset of `0..m` of the given size, in random order.
pub fn random_subset(rng: &mut ChaCha8Rng, m: usize, size: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..m).collect();
    for i in 0..size {
        let j = rng.random_range(i..m);
        all.swap(i, j);
    }
    all.truncate(size);
    all
}

pub fn max_coeff_diff(a: &colsel::Polynomial, b: &colsel::Polynomial) -> f64 {
    let len = a.coeffs().len().max(b.coeffs().len());
    let get = |p: &colsel::Polynomial, i: usize| p.coeffs().get(i).copied().unwrap_or(0.0);
    (0..len).map(|i| (get(a, i) - get(b, i)).abs()).fold(0.0, f64::max)
}

pub fn report(id: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "[{}] criterion {id:>2}: {name} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
}
