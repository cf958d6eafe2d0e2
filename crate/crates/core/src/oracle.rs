//! Independent checks: exhaustive enumeration, lower barrier functions,
//! companion-matrix roots and interlacing tests.
//!
//! Nothing here shares a code path with the Sturm bisection or the
//! derivative/deflation pipeline it is used to check.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expected::{charpoly_psd, IsotropicInstance};
use crate::linalg;
use crate::poly::{smallest_root, Polynomial};
use crate::selector::{build_isotropic, min_singular_check, SelectionProblem};

/// Largest number of subsets [`brute_force`] will enumerate.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Values recorded for one subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetValues {
    pub frob_sq: f64,
    pub spec_sq: f64,
    pub sigma_min_sq: f64,
}

/// Exhaustive optimum over all size-`k` subsets.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    pub best_subset_frob: Vec<usize>,
    pub best_subset_spec: Vec<usize>,
    pub best_frob_sq: f64,
    pub best_spec_sq: f64,
    /// Every subset; rank-deficient ones carry infinite norms.
    pub all_values: BTreeMap<Vec<usize>, SubsetValues>,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Evaluates every size-`k` subset of the columns of `B`.
pub fn brute_force(prob: &SelectionProblem) -> Result<EnumerationResult> {
    let count = binomial(prob.m(), prob.k());
    if count > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let inst = build_isotropic(prob)?;
    let n = prob.n();
    let subsets: Vec<Vec<usize>> = (0..prob.m()).combinations(prob.k()).collect();
    let evaluated: Vec<(Vec<usize>, SubsetValues)> = subsets
        .into_par_iter()
        .map(|s| {
            let sigma_min_sq = min_singular_check(&inst, &s)?;
            let svd = linalg::thin_svd(&prob.augmented(&s)?, prob.rank_tol())?;
            let (frob_sq, spec_sq) = if svd.rank < n {
                (f64::INFINITY, f64::INFINITY)
            } else {
                let inv_sq: Vec<f64> = svd.sigma.iter().map(|s| 1.0 / (s * s)).collect();
                (inv_sq.iter().sum(), inv_sq.iter().fold(0.0, |m: f64, v| m.max(*v)))
            };
            Ok((
                s,
                SubsetValues {
                    frob_sq,
                    spec_sq,
                    sigma_min_sq,
                },
            ))
        })
        .collect::<Result<_>>()?;

    let argmin = |key: fn(&SubsetValues) -> f64| {
        evaluated
            .iter()
            .fold(None::<&(Vec<usize>, SubsetValues)>, |best, cur| match best {
                Some(b) if key(&b.1) <= key(&cur.1) => Some(b),
                _ => Some(cur),
            })
            .filter(|(_, v)| key(v).is_finite())
            .map(|(s, v)| (s.clone(), key(v)))
    };
    let (best_subset_frob, best_frob_sq) = argmin(|v| v.frob_sq)
        .ok_or_else(|| Error::RankDeficient("no size-k subset has full rank".into()))?;
    let (best_subset_spec, best_spec_sq) = argmin(|v| v.spec_sq)
        .ok_or_else(|| Error::RankDeficient("no size-k subset has full rank".into()))?;
    Ok(EnumerationResult {
        best_subset_frob,
        best_subset_spec,
        best_frob_sq,
        best_spec_sq,
        all_values: evaluated.into_iter().collect(),
    })
}

/// Uniform average of the leaf polynomials over all size-`k` supersets of
/// `partial`, computed by direct enumeration.
pub fn enumerated_expected_poly(inst: &IsotropicInstance, partial: &[usize]) -> Result<Polynomial> {
    let rest: Vec<usize> = (0..inst.m()).filter(|i| !partial.contains(i)).collect();
    let need = inst
        .k()
        .checked_sub(partial.len())
        .ok_or_else(|| Error::InvalidSubset("partial assignment larger than k".into()))?;
    let count = binomial(rest.len(), need);
    if count > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            count,
            limit: ENUMERATION_LIMIT,
        });
    }
    let weight = 1.0 / count as f64;
    let mut sum = Polynomial::zero();
    for extra in rest.into_iter().combinations(need) {
        let mut s = partial.to_vec();
        s.extend(extra);
        sum = sum.add(&charpoly_psd(&inst.gram_for(&s)?)?.scale(weight));
    }
    Ok(sum)
}

/// Lower barrier `-p'(x)/p(x) = sum 1/(λ_i - x)`, for `x` below every root.
pub fn barrier(p: &Polynomial, x: f64) -> Result<f64> {
    match p.degree() {
        None => return Err(Error::InvalidInput("barrier of the zero polynomial".into())),
        Some(0) => return Ok(0.0),
        Some(_) => {}
    }
    let lambda_min = smallest_root(p, 1e-13)?;
    if x >= lambda_min - 1e-12 {
        return Err(Error::InvalidInput(format!(
            "barrier point {x} is not below the smallest root {lambda_min}"
        )));
    }
    Ok(barrier_unchecked(p, x))
}

fn barrier_unchecked(p: &Polynomial, x: f64) -> f64 {
    if p.degree().unwrap_or(0) == 0 {
        return 0.0;
    }
    -p.derivative(1).eval(x) / p.eval(x)
}

/// Whether `Φ_{p'}(b + δ) <= Φ_p(b)` given `b < λ_min(p)` and
/// `Φ_p(b) <= 1/δ`.
pub fn barrier_descent_check(p: &Polynomial, b: f64, delta: f64) -> Result<bool> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidInput(format!("delta {delta} must be positive")));
    }
    let phi = barrier(p, b)?;
    if phi * delta > 1.0 + 1e-12 {
        return Err(Error::InvalidInput(format!(
            "barrier {phi} exceeds 1/delta = {}",
            1.0 / delta
        )));
    }
    let dp = p.derivative(1);
    Ok(barrier_unchecked(&dp, b + delta) <= phi + 1e-9)
}

/// Balances a matrix in place by powers of two so row and column norms are
/// comparable.
fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Real parts of the eigenvalues of the balanced companion matrix of `p`,
/// ascending.
pub fn companion_roots(p: &Polynomial) -> Result<Vec<f64>> {
    let d = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("roots of the zero polynomial".into()))?;
    if d == 0 {
        return Ok(Vec::new());
    }
    let monic = p.monic();
    let c = monic.coeffs();
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -c[i];
    }
    balance(&mut comp);
    let mut roots: Vec<f64> = comp.complex_eigenvalues().iter().map(|z| z.re).collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Smallest root of a real-rooted polynomial from companion eigenvalues.
pub fn companion_smallest_root(p: &Polynomial) -> Result<f64> {
    companion_roots(p)?
        .first()
        .copied()
        .ok_or_else(|| Error::InvalidInput("constant polynomial has no roots".into()))
}

/// Whether the roots of `g` (degree d-1) interlace those of `f` (degree d):
/// `β_1 <= α_1 <= β_2 <= ... <= α_{d-1} <= β_d`, with `1e-9` slack.
pub fn interlacing_check(f: &Polynomial, g: &Polynomial) -> Result<bool> {
    let (df, dg) = match (f.degree(), g.degree()) {
        (Some(df), Some(dg)) => (df, dg),
        _ => return Err(Error::InvalidInput("interlacing of the zero polynomial".into())),
    };
    if dg + 1 != df {
        return Err(Error::InvalidInput(format!(
            "interlacing needs deg g = deg f - 1 (got {dg} and {df})"
        )));
    }
    const SLACK: f64 = 1e-9;
    let beta = companion_roots(f)?;
    let alpha = companion_roots(g)?;
    Ok(alpha
        .iter()
        .enumerate()
        .all(|(i, &a)| beta[i] <= a + SLACK && a <= beta[i + 1] + SLACK))
}
