//! Deterministic column subset selection with pseudoinverse norm guarantees.
//!
//! Given a fixed block `A` and candidate columns `B`, [`greedy_select`] picks
//! `k` columns of `B` so that the pseudoinverse of `[A B_S]` stays within a
//! provable factor of the pseudoinverse of `[A B]`, in both the Frobenius and
//! the spectral norm. Columns are chosen by walking a tree of expected
//! characteristic polynomials and keeping, at every level, the child whose
//! smallest root is largest.
//!
//! Modules:
//! - [`linalg`]: dense matrices, thin SVD, pseudoinverse and norms.
//! - [`poly`]: polynomial arithmetic, Sturm chains and bisection root search.
//! - [`expected`]: expected characteristic polynomials of partial selections.
//! - [`selector`]: the greedy loop, the factor Γ and bound verification.
//! - [`oracle`]: brute force and independent cross-checks.
//! - [`gen`]: seeded random instances.

mod dd;
pub mod error;
pub mod expected;
pub mod gen;
pub mod linalg;
pub mod oracle;
pub mod poly;
pub mod selector;

pub use error::{Error, Result};
pub use expected::{charpoly_psd, IsotropicInstance};
pub use linalg::{
    columns, gram_update, hcat, norms_sq, pseudoinverse, thin_svd, DenseMatrix, SvdFactors,
    DEFAULT_RANK_TOL,
};
pub use oracle::{brute_force, EnumerationResult};
pub use poly::{is_real_rooted, smallest_root, Polynomial, SturmChain};
pub use selector::{
    build_isotropic, gamma, greedy_select, min_singular_check, verify_bound, BoundCheck,
    SelectionProblem, SelectionReport, TraceEntry, DEFAULT_EPS,
};
