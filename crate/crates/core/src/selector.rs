//! Deterministic greedy column selection and its approximation bound.
//!
//! Given `A` (n×ℓ, kept unconditionally) and `B` (n×m), the greedy loop picks
//! `k` columns of `B` one at a time. At step `i` every remaining candidate `s`
//! is scored by an ε-approximate smallest root of the expected characteristic
//! polynomial of the partial assignment `{s_1, .., s_{i-1}, s}`; the best
//! score wins, ties going to the smallest column index. The chosen set
//! satisfies
//!
//! ```text
//! ‖[A B_S]^+‖² <= Γ(m,n,k,r) (1 + ‖A^+ B‖_F² / (m-n+r)) (1 + 2kε) ‖[A B]^+‖²
//! ```
//!
//! for both the Frobenius and the spectral norm.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expected::IsotropicInstance;
use crate::linalg::{self, DenseMatrix, DEFAULT_RANK_TOL};
use crate::poly::smallest_root;

/// Default root-approximation tolerance.
pub const DEFAULT_EPS: f64 = 1e-6;

/// The approximation factor
/// `m² / (sqrt((k+1)(m-n+r)) - sqrt((n-r)(m-k-1)))²`.
pub fn gamma(m: usize, n: usize, k: usize, r: usize) -> Result<f64> {
    if !(m > k && r <= n && k + r >= n && m >= n) {
        return Err(Error::InvalidInput(format!(
            "gamma needs m > k >= n - r >= 0 and m >= n (m={m}, n={n}, k={k}, r={r})"
        )));
    }
    // (sqrt(a) - sqrt(b))² = (a - b)² / (a + b + 2 sqrt(ab)), free of cancellation
    let a = ((k + 1) * (m - n + r)) as f64;
    let b = ((n - r) * (m - k - 1)) as f64;
    let m = m as f64;
    Ok(m * m * (a + b + 2.0 * (a * b).sqrt()) / ((a - b) * (a - b)))
}

/// A column selection task: fixed block `a`, candidates `b`, budget `k` and
/// root tolerance `eps`.
#[derive(Debug, Clone)]
pub struct SelectionProblem {
    a: DenseMatrix,
    b: DenseMatrix,
    k: usize,
    eps: f64,
    rank_tol: f64,
    rank_a: usize,
}

impl SelectionProblem {
    /// `a` may have zero columns. Uses the default rank tolerance.
    pub fn new(a: DenseMatrix, b: DenseMatrix, k: usize, eps: f64) -> Result<Self> {
        Self::with_rank_tol(a, b, k, eps, DEFAULT_RANK_TOL)
    }

    /// Problem with no fixed block.
    pub fn without_fixed(b: DenseMatrix, k: usize, eps: f64) -> Result<Self> {
        let a = DenseMatrix::zeros(b.rows(), 0);
        Self::new(a, b, k, eps)
    }

    pub fn with_rank_tol(
        a: DenseMatrix,
        b: DenseMatrix,
        k: usize,
        eps: f64,
        rank_tol: f64,
    ) -> Result<Self> {
        let n = b.rows();
        let m = b.cols();
        if n == 0 || m == 0 {
            return Err(Error::InvalidInput("B must be non-empty".into()));
        }
        let full = linalg::hcat(&a, &b)?;
        let rank_ab = linalg::rank(&full, rank_tol)?;
        if rank_ab < n {
            return Err(Error::RankDeficient(format!(
                "rank([A B]) = {rank_ab} is less than the {n} rows"
            )));
        }
        let rank_a = if a.cols() == 0 {
            0
        } else {
            linalg::rank(&a, rank_tol)?
        };
        if k + rank_a < n {
            return Err(Error::InvalidInput(format!(
                "k must be >= n - rank(A) = {}",
                n - rank_a
            )));
        }
        if k + 1 > m {
            return Err(Error::InvalidInput(format!(
                "k must be <= m - 1 = {}",
                m - 1
            )));
        }
        if m < n {
            return Err(Error::InvalidInput(format!(
                "B needs at least as many columns as rows (m = {m} < n = {n})"
            )));
        }
        if !(eps > 0.0 && 2.0 * k as f64 * eps < 1.0) {
            return Err(Error::InvalidInput(format!(
                "eps must be in (0, 1/(2k)); got {eps} with k = {k}"
            )));
        }
        Ok(Self {
            a,
            b,
            k,
            eps,
            rank_tol,
            rank_a,
        })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn n(&self) -> usize {
        self.b.rows()
    }

    pub fn m(&self) -> usize {
        self.b.cols()
    }

    pub fn ell(&self) -> usize {
        self.a.cols()
    }

    /// Numerical rank of `A`.
    pub fn r(&self) -> usize {
        self.rank_a
    }

    pub fn gamma(&self) -> f64 {
        gamma(self.m(), self.n(), self.k, self.rank_a).expect("validated on construction")
    }

    /// `1 + ‖A^+ B‖_F² / (m-n+r)`, or 1 when there is no fixed block.
    pub fn fixed_block_factor(&self) -> Result<f64> {
        if self.ell() == 0 {
            return Ok(1.0);
        }
        let apb = linalg::pseudoinverse_with_tol(&self.a, self.rank_tol)?.matmul(&self.b)?;
        let (frob_sq, _) = linalg::norms_sq(&apb)?;
        let denom = (self.m() + self.rank_a - self.n()) as f64;
        Ok(1.0 + frob_sq / denom)
    }

    /// `Γ · (1 + ‖A^+ B‖_F² / (m-n+r))`, optionally times `(1 + 2kε)`.
    pub fn bound_factor(&self, with_eps_slack: bool) -> Result<f64> {
        let base = self.gamma() * self.fixed_block_factor()?;
        Ok(if with_eps_slack {
            base * (1.0 + 2.0 * self.k as f64 * self.eps)
        } else {
            base
        })
    }

    /// `[A B_S]`.
    pub fn augmented(&self, subset: &[usize]) -> Result<DenseMatrix> {
        linalg::hcat(&self.a, &linalg::columns(&self.b, subset)?)
    }

    /// Squared norms of `[A B]^+` as `(frobenius, spectral)`.
    pub fn baseline_norms_sq(&self) -> Result<(f64, f64)> {
        let full = linalg::hcat(&self.a, &self.b)?;
        linalg::norms_sq(&linalg::pseudoinverse_with_tol(&full, self.rank_tol)?)
    }

    /// Squared norms of `[A B_S]^+`, failing if `[A B_S]` lacks full row rank.
    pub fn subset_norms_sq(&self, subset: &[usize]) -> Result<(f64, f64)> {
        let sel = self.augmented(subset)?;
        if linalg::rank(&sel, self.rank_tol)? < self.n() {
            return Err(Error::RankDeficient("selected columns rank-deficient".into()));
        }
        linalg::norms_sq(&linalg::pseudoinverse_with_tol(&sel, self.rank_tol)?)
    }
}

/// Maps a selection problem to its isotropic form via the thin SVD
/// `[A B] = U Σ Y`; the first `ℓ` columns of `Y` form the fixed block.
pub fn build_isotropic(prob: &SelectionProblem) -> Result<IsotropicInstance> {
    let full = linalg::hcat(&prob.a, &prob.b)?;
    let svd = linalg::thin_svd(&full, prob.rank_tol)?;
    if svd.rank < prob.n() {
        return Err(Error::RankDeficient(format!(
            "rank([A B]) = {} is less than the {} rows",
            svd.rank,
            prob.n()
        )));
    }
    IsotropicInstance::with_rank(svd.vt, (0..prob.ell()).collect(), prob.k, prob.rank_a)
}

/// One greedy step: the chosen column and its approximate root value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    pub lambda_min: f64,
}

/// Outcome of [`greedy_select`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    /// 0-based indices into `B`, in selection order.
    pub subset: Vec<usize>,
    pub frob_sq: f64,
    pub spec_sq: f64,
    pub baseline_frob_sq: f64,
    pub baseline_spec_sq: f64,
    pub gamma: f64,
    pub bound_factor: f64,
    pub eps: f64,
    pub trace: Vec<TraceEntry>,
    /// Candidates whose polynomial pipeline failed numerically.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SelectionReport {
    /// Both norm ratios within `bound_factor`, up to relative slack.
    pub fn bound_holds(&self, rel_slack: f64) -> bool {
        let limit = self.bound_factor * (1.0 + rel_slack);
        self.frob_sq <= limit * self.baseline_frob_sq && self.spec_sq <= limit * self.baseline_spec_sq
    }
}

/// Picks the largest score, breaking ties by the smallest index. Scores that
/// are not finite never win. The result does not depend on input order.
pub fn select_best(scores: &[(usize, f64)]) -> Option<(usize, f64)> {
    scores
        .iter()
        .copied()
        .filter(|(_, v)| v.is_finite())
        .fold(None, |best, (i, v)| match best {
            Some((bi, bv)) if bv > v || (bv == v && bi < i) => Some((bi, bv)),
            _ => Some((i, v)),
        })
}

/// Runs the greedy selection loop.
pub fn greedy_select(prob: &SelectionProblem) -> Result<SelectionReport> {
    let inst = build_isotropic(prob)?;
    let mut gram = inst.gram_fixed().clone();
    let mut chosen: Vec<usize> = Vec::with_capacity(prob.k);
    let mut trace = Vec::with_capacity(prob.k);
    let mut warnings = Vec::new();

    for step in 1..=prob.k {
        let candidates: Vec<usize> = (0..prob.m()).filter(|s| !chosen.contains(s)).collect();
        let scored: Vec<(usize, Result<f64>)> = candidates
            .par_iter()
            .map(|&s| {
                let score = linalg::gram_update(&gram, inst.free_column(s))
                    .and_then(|g| inst.expected_poly_from_gram(&g, step))
                    .and_then(|p| smallest_root(&p, prob.eps));
                (s, score)
            })
            .collect();

        let mut scores = Vec::with_capacity(scored.len());
        for (s, res) in scored {
            match res {
                Ok(v) => scores.push((s, v)),
                Err(e) => {
                    let msg = format!("step {step}: candidate {s} skipped: {e}");
                    warn!("{msg}");
                    warnings.push(msg);
                    scores.push((s, f64::NEG_INFINITY));
                }
            }
        }
        let (best, lambda_min) = select_best(&scores).ok_or_else(|| Error::AlgorithmFailure {
            iteration: step,
            message: "every candidate failed to produce a root".into(),
        })?;
        gram = linalg::gram_update(&gram, inst.free_column(best))?;
        chosen.push(best);
        trace.push(TraceEntry {
            index: best,
            lambda_min,
        });
    }

    let (frob_sq, spec_sq) = prob.subset_norms_sq(&chosen).map_err(|e| Error::AlgorithmFailure {
        iteration: prob.k,
        message: format!("selected set unusable: {e}"),
    })?;
    let (baseline_frob_sq, baseline_spec_sq) = prob.baseline_norms_sq()?;
    let report = SelectionReport {
        subset: chosen,
        frob_sq,
        spec_sq,
        baseline_frob_sq,
        baseline_spec_sq,
        gamma: prob.gamma(),
        bound_factor: prob.bound_factor(true)?,
        eps: prob.eps,
        trace,
        warnings,
    };
    if !report.bound_holds(1e-7) {
        return Err(Error::AlgorithmFailure {
            iteration: prob.k,
            message: format!(
                "guarantee violated: ratios {:.6e}, {:.6e} exceed factor {:.6e}",
                report.frob_sq / report.baseline_frob_sq,
                report.spec_sq / report.baseline_spec_sq,
                report.bound_factor
            ),
        });
    }
    Ok(report)
}

/// Norm ratios of a subset against the full matrix and the bound they are
/// compared with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    pub ratio_frob: f64,
    pub ratio_spec: f64,
    pub bound: f64,
}

/// Compares `‖[A B_S]^+‖² / ‖[A B]^+‖²` with the approximation factor.
pub fn verify_bound(prob: &SelectionProblem, subset: &[usize], with_eps_slack: bool) -> Result<BoundCheck> {
    if subset.len() != prob.k {
        return Err(Error::InvalidSubset(format!(
            "subset has {} indices, expected k = {}",
            subset.len(),
            prob.k
        )));
    }
    let (frob_sq, spec_sq) = prob.subset_norms_sq(subset)?;
    let (base_frob, base_spec) = prob.baseline_norms_sq()?;
    let bound = prob.bound_factor(with_eps_slack)?;
    let ratio_frob = frob_sq / base_frob;
    let ratio_spec = spec_sq / base_spec;
    Ok(BoundCheck {
        holds: ratio_frob <= bound && ratio_spec <= bound,
        ratio_frob,
        ratio_spec,
        bound,
    })
}

/// `σ_min([M Y_S])²`, the smallest eigenvalue of `M M^T + Y_S Y_S^T`.
pub fn min_singular_check(inst: &IsotropicInstance, subset: &[usize]) -> Result<f64> {
    let eig = linalg::symmetric_eigenvalues(&inst.gram_for(subset)?)?;
    Ok(eig.first().map_or(0.0, |&l| l.max(0.0)))
}

/// `Γ^{-1}(m,n,k,r) · (m-n+r) / (m-n+‖M^+‖_F²)`, the guaranteed floor on the
/// smallest root of the expected polynomial at the tree root.
pub fn isotropic_lower_bound(inst: &IsotropicInstance, rank_tol: f64) -> Result<f64> {
    let g = gamma(inst.m(), inst.n(), inst.k(), inst.r())?;
    let pinv_frob_sq = if inst.ell() == 0 {
        0.0
    } else {
        linalg::norms_sq(&linalg::pseudoinverse_with_tol(&inst.fixed_block(), rank_tol)?)?.0
    };
    let spread = (inst.m() + inst.r() - inst.n()) as f64;
    Ok(spread / (g * (inst.m() as f64 - inst.n() as f64 + pinv_frob_sq)))
}
