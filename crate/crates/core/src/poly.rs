//! Dense univariate real polynomials and Sturm-sequence root location.

use std::fmt;

use crate::dd::{Dd, DD_EPS};
use crate::error::{Error, Result};

/// Default relative remainder tolerance for [`Polynomial::deflate_shifted_power`].
pub const DEFAULT_REM_TOL: f64 = 1e-8;

/// Relative size below which a Sturm remainder is treated as zero.
const STURM_GCD_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 400;

/// Real polynomial with coefficients in ascending degree.
///
/// The highest stored coefficient is always nonzero; the zero polynomial has
/// no coefficients.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(
                "polynomial coefficients must be finite".into(),
            ));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    fn from_raw(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_raw(vec![c])
    }

    /// Monic polynomial with the given roots, multiplied in ascending `|root|`
    /// order in double-double and rounded once.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut sorted = roots.to_vec();
        sorted.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        let mut coeffs = vec![Dd::from(1.0)];
        for r in sorted {
            coeffs.push(Dd::default());
            for i in (0..coeffs.len()).rev() {
                let lower = if i > 0 { coeffs[i - 1] } else { Dd::default() };
                coeffs[i] = lower - coeffs[i].mul_f64(r);
            }
        }
        Self::from_raw(coeffs.iter().map(|c| c.hi).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Value at `x` together with `sum |c_i| |x|^i`, the scale of rounding
    /// error in the Horner evaluation.
    pub fn eval_with_scale(&self, x: f64) -> (f64, f64) {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold((0.0, 0.0), |(v, s), &c| (v * x + c, s * ax + c.abs()))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_raw(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            Some(&lead) => self.scale(1.0 / lead),
            None => Self::zero(),
        }
    }

    /// Divides by the largest absolute coefficient, keeping signs.
    pub fn normalized(&self) -> Self {
        let m = self.max_abs_coeff();
        if m == 0.0 {
            Self::zero()
        } else {
            self.scale(1.0 / m)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Self::from_raw((0..len).map(|i| get(self, i) + get(other, i)).collect())
    }

    /// `weight * self + (1 - weight) * other`.
    pub fn convex_combination(&self, other: &Self, weight: f64) -> Self {
        self.scale(weight).add(&other.scale(1.0 - weight))
    }

    /// The `times`-fold formal derivative.
    pub fn derivative(&self, times: usize) -> Self {
        let mut c = self.coeffs.clone();
        for _ in 0..times {
            if c.is_empty() {
                break;
            }
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &v)| v * i as f64)
                .collect();
        }
        Self::from_raw(c)
    }

    /// `self * (x - 1)^power`.
    pub fn mul_shifted_power(&self, power: usize) -> Self {
        let mut c = self.coeffs.clone();
        for _ in 0..power {
            if c.is_empty() {
                break;
            }
            let mut next = vec![0.0; c.len() + 1];
            for (i, &v) in c.iter().enumerate() {
                next[i + 1] += v;
                next[i] -= v;
            }
            c = next;
        }
        Self::from_raw(c)
    }

    /// Exact quotient of `self` by `(x - 1)^power`.
    ///
    /// Each synthetic-division remainder must be at most
    /// `rem_tol * max|coeff of self|`.
    pub fn deflate_shifted_power(&self, power: usize, rem_tol: f64) -> Result<Self> {
        let tolerance = rem_tol * self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        for _ in 0..power {
            if c.is_empty() {
                break;
            }
            // c(x) = (x - 1) q(x) + rem
            let d = c.len() - 1;
            let mut q = vec![0.0; d];
            let mut carry = 0.0;
            for i in (1..=d).rev() {
                carry += c[i];
                q[i - 1] = carry;
            }
            let remainder = carry + c[0];
            if remainder.abs() > tolerance {
                return Err(Error::DeflationFailure {
                    remainder: remainder.abs(),
                    tolerance,
                });
            }
            c = q;
        }
        Ok(Self::from_raw(c))
    }

    /// `self * (x - 1)^power` for any signed `power`; negative powers deflate.
    pub fn shift_power(&self, power: i64, rem_tol: f64) -> Result<Self> {
        if power >= 0 {
            Ok(self.mul_shifted_power(power as usize))
        } else {
            self.deflate_shifted_power(power.unsigned_abs() as usize, rem_tol)
        }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

/// Ascending coefficients in double-double, trailing zeros stripped.
#[derive(Debug, Clone)]
struct DdPoly(Vec<Dd>);

impl DdPoly {
    fn from_poly(p: &Polynomial) -> Self {
        Self(p.coeffs.iter().map(|&c| Dd::from(c)).collect())
    }

    fn strip(mut c: Vec<Dd>) -> Self {
        while c.last().is_some_and(|d| d.hi == 0.0) {
            c.pop();
        }
        Self(c)
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn leading(&self) -> Dd {
        *self.0.last().expect("nonzero polynomial")
    }

    fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m: f64, c| m.max(c.hi.abs()))
    }

    fn normalized(&self) -> Self {
        let s = Dd::from(self.max_abs());
        Self(self.0.iter().map(|&c| c / s).collect())
    }

    fn neg(&self) -> Self {
        Self(self.0.iter().map(|&c| -c).collect())
    }

    fn derivative(&self) -> Self {
        Self::strip(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c.mul_f64(i as f64))
                .collect(),
        )
    }

    fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree();
        let lead = divisor.leading();
        let mut r = self.0.clone();
        let mut q = vec![Dd::default(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let factor = r[r.len() - 1] / lead;
            q[shift] = factor;
            for (i, &dc) in divisor.0.iter().enumerate() {
                r[shift + i] = r[shift + i] - factor * dc;
            }
            r.pop();
        }
        (Self::strip(q), Self::strip(r))
    }

    /// Horner in double-double; also returns `sum |c_i| |x|^i`.
    fn eval_with_scale(&self, x: f64) -> (f64, f64) {
        let mut v = Dd::default();
        let mut scale = 0.0;
        for &c in self.0.iter().rev() {
            v = v.mul_f64(x) + c;
            scale = scale * x.abs() + c.hi.abs();
        }
        (v.hi, scale)
    }

    fn to_poly(&self) -> Polynomial {
        Polynomial::from_raw(self.0.iter().map(|c| c.hi).collect())
    }
}

/// Sturm chain `p, p', -rem(p, p'), ...` with every element scaled to unit
/// max-coefficient.
///
/// The chain is built in double-double precision. Construction stops early
/// when a remainder falls below a relative `1e-12`, in which case the last
/// element is (numerically) `gcd(p, p')`. Signs are read off the chain divided
/// by that gcd, so repeated roots count once and behave like simple ones.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Polynomial>,
    gcd: DdPoly,
    reduced: Vec<DdPoly>,
}

impl SturmChain {
    pub fn new(p: &Polynomial) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidInput(
                "Sturm chain of the zero polynomial".into(),
            ));
        }
        Ok(Self::from_dd(&DdPoly::from_poly(p)))
    }

    fn from_dd(p: &DdPoly) -> Self {
        let mut chain = vec![p.normalized()];
        let dp = p.derivative();
        if !dp.0.is_empty() {
            chain.push(dp.normalized());
        }
        while chain.len() >= 2 {
            let n = chain.len();
            if chain[n - 1].degree() == 0 {
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.0.is_empty() || r.max_abs() < STURM_GCD_TOL {
                break;
            }
            chain.push(r.normalized().neg());
        }
        let g = chain.last().expect("chain is never empty").clone();
        let reduced = if g.degree() == 0 {
            chain.clone()
        } else {
            chain.iter().map(|p| p.div_rem(&g).0.normalized()).collect()
        };
        Self {
            chain: chain.iter().map(DdPoly::to_poly).collect(),
            gcd: g,
            reduced,
        }
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.chain
    }

    /// Last element: a constant when `p` is square-free, otherwise the
    /// numerical `gcd(p, p')`.
    pub fn gcd(&self) -> &Polynomial {
        self.chain.last().expect("chain is never empty")
    }

    fn variations(signs: impl Iterator<Item = f64>) -> usize {
        let mut last = 0.0;
        let mut count = 0;
        for s in signs.filter(|&s| s != 0.0) {
            if last != 0.0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations_at_neg_infinity(&self) -> usize {
        Self::variations(self.reduced.iter().map(|p| {
            let s = p.leading().hi.signum();
            if p.degree() % 2 == 0 { s } else { -s }
        }))
    }

    fn variations_at_pos_infinity(&self) -> usize {
        Self::variations(self.reduced.iter().map(|p| p.leading().hi.signum()))
    }

    fn variations_at(&self, x: f64) -> usize {
        Self::variations(self.reduced.iter().map(|p| {
            // within the double-double Horner rounding bound the sign is noise
            let (v, scale) = p.eval_with_scale(x);
            let band = 4.0 * (p.degree() as f64 + 1.0) * DD_EPS * scale;
            if v.abs() <= band { 0.0 } else { v.signum() }
        }))
    }
    /// Number of distinct real roots in `(-inf, x]`.
    pub fn count_roots_leq(&self, x: f64) -> usize {
        self.variations_at_neg_infinity()
            .saturating_sub(self.variations_at(x))
    }

    /// Number of distinct real roots.
    pub fn distinct_real_roots(&self) -> usize {
        self.variations_at_neg_infinity()
            .saturating_sub(self.variations_at_pos_infinity())
    }
}

/// `1 + max |c_i / c_deg|` radius bound on all (complex) roots, minus one.
fn cauchy_radius(p: &Polynomial) -> f64 {
    let lead = p.leading();
    let d = p.coeffs.len() - 1;
    p.coeffs[..d]
        .iter()
        .fold(0.0, |m: f64, c| m.max((c / lead).abs()))
}

/// Smallest real root of `p` to within `eps`, by bisection on Sturm counts
/// over the Cauchy bracket `[-1-R, 1+R]`.
pub fn smallest_root(p: &Polynomial, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidInput(format!("eps {eps} must be positive")));
    }
    let chain = SturmChain::new(p)?;
    let radius = cauchy_radius(p);
    let (mut lo, mut hi) = (-1.0 - radius, 1.0 + radius);
    if chain.count_roots_leq(hi) == 0 {
        return Err(Error::NotRealRooted);
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= eps {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chain.count_roots_leq(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Whether every root of `p` is real, counting multiplicity through
/// successive gcd layers `p, gcd(p, p'), ...`.
pub fn is_real_rooted(p: &Polynomial) -> bool {
    let Some(degree) = p.degree() else {
        return false;
    };
    let mut layer = DdPoly::from_poly(p);
    let mut total = 0;
    loop {
        let chain = SturmChain::from_dd(&layer);
        total += chain.distinct_real_roots();
        let d = chain.gcd.degree();
        if d == 0 || chain.chain.len() < 2 || d >= layer.degree() {
            break;
        }
        layer = chain.gcd;
    }
    total == degree
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn normalizes_trailing_zeros() {
        let p = poly(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert!(poly(&[0.0]).is_zero());
        assert!(Polynomial::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(poly(&[-1.0, 0.0, 1.0]).derivative(1), poly(&[0.0, 2.0]));
        assert_eq!(poly(&[0.0, 0.0, 0.0, 1.0]).derivative(3), poly(&[6.0]));
        assert!(poly(&[5.0]).derivative(1).is_zero());
        assert_eq!(poly(&[1.0, 1.0]).derivative(0), poly(&[1.0, 1.0]));
    }

    #[test]
    fn shifted_power_multiplication() {
        assert_eq!(poly(&[1.0]).mul_shifted_power(2), poly(&[1.0, -2.0, 1.0]));
        assert_eq!(poly(&[0.0, 1.0]).mul_shifted_power(0), poly(&[0.0, 1.0]));
        assert_eq!(poly(&[1.0, 1.0]).mul_shifted_power(1), poly(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn shifted_power_deflation() {
        let q = poly(&[1.0, -2.0, 1.0]).deflate_shifted_power(2, DEFAULT_REM_TOL);
        assert_eq!(q.unwrap(), poly(&[1.0]));
        let q = poly(&[-1.0, 0.0, 1.0]).deflate_shifted_power(1, DEFAULT_REM_TOL);
        assert_eq!(q.unwrap(), poly(&[1.0, 1.0]));
        let err = poly(&[0.0, 0.0, 1.0]).deflate_shifted_power(1, DEFAULT_REM_TOL);
        match err {
            Err(Error::DeflationFailure { remainder, .. }) => assert_eq!(remainder, 1.0),
            other => panic!("expected deflation failure, got {other:?}"),
        }
    }

    #[test]
    fn signed_shift() {
        let p = poly(&[1.0, 1.0]);
        let up = p.shift_power(2, DEFAULT_REM_TOL).unwrap();
        assert_eq!(up.shift_power(-2, DEFAULT_REM_TOL).unwrap(), p);
    }

    #[test]
    fn from_roots_expands() {
        let p = Polynomial::from_roots(&[1.0, 2.0, 3.0]);
        assert_eq!(p, poly(&[-6.0, 11.0, -6.0, 1.0]));
    }

    #[test]
    fn sturm_chain_shapes() {
        let c = SturmChain::new(&poly(&[-1.0, 0.0, 1.0])).unwrap();
        let degs: Vec<_> = c.polys().iter().map(|p| p.degree().unwrap()).collect();
        assert_eq!(degs, vec![2, 1, 0]);
        assert!(c.polys()[2].leading() > 0.0);

        let c = SturmChain::new(&poly(&[-3.0, 1.0])).unwrap();
        assert_eq!(c.polys().len(), 2);

        // (x-1)^2: remainder vanishes, chain ends at the gcd x - 1
        let c = SturmChain::new(&poly(&[1.0, -2.0, 1.0])).unwrap();
        assert_eq!(c.polys().len(), 2);
        let g = c.gcd().monic();
        assert!((g.coeffs()[0] + 1.0).abs() < 1e-15);

        assert!(SturmChain::new(&Polynomial::zero()).is_err());
    }

    #[test]
    fn root_counting() {
        let c = SturmChain::new(&poly(&[-1.0, 0.0, 1.0])).unwrap();
        assert_eq!(c.count_roots_leq(0.0), 1);
        assert_eq!(c.count_roots_leq(2.0), 2);
        assert_eq!(c.count_roots_leq(-2.0), 0);
        assert_eq!(c.count_roots_leq(1.0), 2);
        let c = SturmChain::new(&poly(&[1.0, 0.0, 1.0])).unwrap();
        for x in [-10.0, 0.0, 3.0] {
            assert_eq!(c.count_roots_leq(x), 0);
        }
    }

    #[test]
    fn smallest_root_examples() {
        let p = Polynomial::from_roots(&[1.0, 2.0, 3.0]);
        assert!((smallest_root(&p, 1e-6).unwrap() - 1.0).abs() <= 1e-6);
        let p = poly(&[1.0, -2.0, 1.0]);
        assert!((smallest_root(&p, 1e-6).unwrap() - 1.0).abs() <= 1e-6);
        let p = poly(&[-0.5, 1.0]);
        assert!((smallest_root(&p, 1e-9).unwrap() - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn smallest_root_errors() {
        assert_eq!(
            smallest_root(&poly(&[1.0, 0.0, 1.0]), 1e-6),
            Err(Error::NotRealRooted)
        );
        assert!(smallest_root(&poly(&[1.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn real_rootedness() {
        assert!(!is_real_rooted(&poly(&[1.0, 0.0, 1.0])));
        assert!(is_real_rooted(&Polynomial::from_roots(&[1.0, 2.0])));
        assert!(is_real_rooted(&poly(&[1.0, -2.0, 1.0])));
        assert!(is_real_rooted(&Polynomial::from_roots(&[0.5, 0.5, 0.5, 2.0])));
        // (x-1)^2 (x^2+1)
        let p = poly(&[1.0, 0.0, 1.0]).mul_shifted_power(2);
        assert!(!is_real_rooted(&p));
        assert!(is_real_rooted(&poly(&[3.0])));
        assert!(!is_real_rooted(&Polynomial::zero()));
    }
}
