//! The polynomial system `p_n(x) = (-1)^n e^x A^n e^{-x}` with
//! `A = x^2 - x d/dx x d/dx`.
//!
//! Coefficients are built two independent ways, both in exact big-integer
//! arithmetic: the three-term differential recurrence, and the closed triple
//! sum for `a_{k,n}`. Floating point appears only when a polynomial is
//! evaluated.

mod bernoulli;
mod series;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::report::{CheckSuite, CrossCheckReport};

pub use bernoulli::{bernoulli_exact, bernoulli_numbers, verify_bernoulli_integral};
pub use series::{
    asymptotic_main_term, asymptotic_ratio_study, poly_asymptotic_ratio, poly_bound, poly_kl_image,
    poly_series_bessel, series_peak_index, BoundParams, RatioRow, SeriesSum,
};

/// `p_n` as an exact integer coefficient vector; `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactPolynomial {
    coeffs: Vec<BigInt>,
}

impl ExactPolynomial {
    /// Build from coefficients, dropping trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("non-empty")
    }

    /// Coefficients rounded to `f64`.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }
}

/// Exact binomial coefficient row `C(k, 0..=k)`.
fn binomial_row(k: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(k + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for j in 0..k {
        c = c * BigInt::from(k - j) / BigInt::from(j + 1);
        row.push(c.clone());
    }
    row
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `(2n - 1)!! = 1 * 3 * ... * (2n - 1)`, with `(-1)!! = 1`.
pub fn double_factorial_odd(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(2 * k - 1))
}

/// `2^k` times the inner double sum
/// `sum_r (-1)^r 2^{-r} C(k,r) sum_j (-1)^j 2^{-j} C(k-r,j) (r-j)^{2n}`,
/// which is an integer.
pub fn scaled_triple_sum(k: usize, n: usize) -> BigInt {
    let outer = binomial_row(k);
    let powers: Vec<BigInt> = (0..=k).map(|d| num_traits::pow(BigInt::from(d), 2 * n)).collect();
    let mut total = BigInt::zero();
    for (r, c_kr) in outer.iter().enumerate() {
        let inner_row = binomial_row(k - r);
        let mut inner = BigInt::zero();
        for (j, c_j) in inner_row.iter().enumerate() {
            // (r - j)^{2n} is even in (r - j)
            let p = &powers[r.abs_diff(j)];
            let term = c_j * p << (k - r - j);
            if j % 2 == 0 {
                inner += term;
            } else {
                inner -= term;
            }
        }
        let term = c_kr * inner;
        if r % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// `p_n` from the closed coefficient formula. The division by `2^k k!` is
/// done last and must be exact.
pub fn poly_explicit(n: usize) -> Result<ExactPolynomial> {
    if n == 0 {
        return Ok(ExactPolynomial::from_coeffs(vec![BigInt::one()]));
    }
    let mut coeffs = vec![BigInt::zero(); n + 1];
    for (k, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let numerator = scaled_triple_sum(k, n);
        let denominator = factorial(k) << k;
        let (q, rem) = numerator.div_rem(&denominator);
        if !rem.is_zero() {
            return Err(Error::NonIntegerCoefficient { k, n });
        }
        *slot = q;
    }
    Ok(ExactPolynomial::from_coeffs(coeffs))
}

/// `p_n` from `p_{n+1} = x^2 p_n'' + x(1 - 2x) p_n' - x p_n`, `p_0 = 1`.
///
/// In coefficients: `c'_k = k^2 c_k - (2k - 1) c_{k-1}`.
pub fn poly_recurrence(n: usize) -> ExactPolynomial {
    (0..n).fold(ExactPolynomial::from_coeffs(vec![BigInt::one()]), |p, _| recurrence_step(&p))
}

/// All of `p_0, ..., p_{n_max}` from the recurrence.
pub fn poly_table(n_max: usize) -> Vec<ExactPolynomial> {
    let mut out = vec![poly_recurrence(0)];
    for n in 0..n_max {
        let next = recurrence_step(&out[n]);
        out.push(next);
    }
    out
}

fn recurrence_step(p: &ExactPolynomial) -> ExactPolynomial {
    let c = p.coeffs();
    let d = c.len();
    let mut next = vec![BigInt::zero(); d + 1];
    for (k, slot) in next.iter_mut().enumerate() {
        if k < d {
            *slot += &c[k] * BigInt::from(k * k);
        }
        if k >= 1 {
            *slot -= &c[k - 1] * BigInt::from(2 * k - 1);
        }
    }
    ExactPolynomial::from_coeffs(next)
}

/// `p(x)` evaluated exactly at the binary value of `x` and rounded once.
pub fn poly_eval(p: &ExactPolynomial, x: f64) -> f64 {
    match BigRational::from_float(x) {
        Some(xr) => p.eval_exact(&xr).to_f64().unwrap_or(f64::NAN),
        None => poly_eval_horner(p, x),
    }
}

/// Plain floating-point Horner evaluation.
pub fn poly_eval_horner(p: &ExactPolynomial, x: f64) -> f64 {
    p.coeffs_f64().iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Check the vanishing of the triple sum for `k = n+1..=2n` and its value
/// `(-1)^n n! (2n-1)!!` at `k = n`, for every `1 <= n <= n_max`, plus the
/// agreement of both constructions. Comparisons are exact.
pub fn verify_identities(n_max: usize) -> Result<CheckSuite> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut suite = CheckSuite::new("polys-identities");
    for n in 1..=n_max {
        for k in n + 1..=2 * n {
            let s = scaled_triple_sum(k, n);
            suite.push(CrossCheckReport::exact(
                format!("vanishing sum n={n} k={k}"),
                s.to_f64().unwrap_or(f64::NAN),
                0.0,
                s.is_zero(),
            ));
        }
        let s = scaled_triple_sum(n, n);
        let mut expected = factorial(n) * double_factorial_odd(n) << n;
        if n % 2 == 1 {
            expected = -expected;
        }
        suite.push(CrossCheckReport::exact(
            format!("diagonal sum n={n} k={n}"),
            (s.to_f64().unwrap_or(f64::NAN)) / 2f64.powi(n as i32),
            (expected.to_f64().unwrap_or(f64::NAN)) / 2f64.powi(n as i32),
            s == expected,
        ));
        let explicit = poly_explicit(n)?;
        let recurrence = poly_recurrence(n);
        suite.push(CrossCheckReport::exact(
            format!("explicit == recurrence n={n}"),
            explicit.leading().to_f64().unwrap_or(f64::NAN),
            recurrence.leading().to_f64().unwrap_or(f64::NAN),
            explicit == recurrence,
        ));
    }
    Ok(suite)
}

/// Largest `|t|` for which the growth bounds give a convergent tail for the
/// generating series: `alpha / 2` at the widest admissible `alpha = 2 pi / 3`.
pub const GENERATING_RADIUS: f64 = std::f64::consts::PI / 3.0;

/// Compare `sum_{n<=N} p_n(x) t^{2n} / (2n)!` with `exp(-2x sinh^2(t/2))`.
///
/// The partial sum is formed exactly and rounded once. The context records
/// the growth bound on the discarded tail; the check passes when the
/// discrepancy is within both `tolerance` and that bound.
pub fn generating_check(x: f64, t: f64, n_terms: usize, tolerance: f64) -> Result<CrossCheckReport> {
    if n_terms < 2 {
        return Err(Error::Domain("at least two terms are required".into()));
    }
    if !(t.abs() < GENERATING_RADIUS) {
        return Err(Error::Domain(format!("|t| = {} is outside the radius guard {GENERATING_RADIUS}", t.abs())));
    }
    let xr = BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("x = {x} is not finite")))?;
    let t2 = BigRational::from_float(t * t).ok_or_else(|| Error::Domain(format!("t = {t} is not finite")))?;
    let mut p = poly_recurrence(0);
    let mut weight = BigRational::one();
    let mut sum = BigRational::zero();
    for n in 0..=n_terms {
        if n > 0 {
            p = recurrence_step(&p);
            weight = weight * &t2 / BigRational::from_integer(BigInt::from((2 * n - 1) * 2 * n));
        }
        sum += p.eval_exact(&xr) * &weight;
    }
    let partial = sum.to_f64().unwrap_or(f64::NAN);
    let sh = (0.5 * t).sinh();
    let direct = (-2.0 * x * sh * sh).exp();

    let params = BoundParams::new(1.0, 2.0 * std::f64::consts::PI / 3.0)?;
    let tail = series::generating_tail_bound(x.max(f64::MIN_POSITIVE), t, n_terms, &params);
    let mut report = CrossCheckReport::new(
        format!("generating function x={x} t={t} N={n_terms} bound-tail<={tail:.3e}"),
        partial,
        direct,
        tolerance,
    );
    report.passed = report.passed && report.abs_diff <= tail.max(4.0 * f64::EPSILON);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn listed_polynomials() {
        assert_eq!(poly_recurrence(0).coeffs(), ints(&[1]).as_slice());
        assert_eq!(poly_recurrence(1).coeffs(), ints(&[0, -1]).as_slice());
        assert_eq!(poly_recurrence(2).coeffs(), ints(&[0, -1, 3]).as_slice());
        assert_eq!(poly_recurrence(3).coeffs(), ints(&[0, -1, 15, -15]).as_slice());
        assert_eq!(poly_explicit(1).unwrap().coeffs(), ints(&[0, -1]).as_slice());
        assert_eq!(poly_explicit(2).unwrap().coeff(2), BigInt::from(3));
        assert_eq!(poly_explicit(3).unwrap().coeffs(), ints(&[0, -1, 15, -15]).as_slice());
        assert_eq!(poly_explicit(0).unwrap(), poly_recurrence(0));
    }

    #[test]
    fn leading_coefficient_of_p4() {
        assert_eq!(poly_recurrence(4).leading(), &BigInt::from(105));
    }

    #[test]
    fn explicit_equals_recurrence() {
        for n in 0..=30 {
            assert_eq!(poly_explicit(n).unwrap(), poly_recurrence(n), "n={n}");
        }
    }

    #[test]
    fn leading_and_constant_coefficients() {
        for (n, p) in poly_table(30).iter().enumerate() {
            assert_eq!(p.degree(), n);
            let mut lead = double_factorial_odd(n);
            if n % 2 == 1 {
                lead = -lead;
            }
            assert_eq!(p.leading(), &lead);
            if n >= 1 {
                assert!(p.coeff(0).is_zero());
            }
        }
    }

    #[test]
    fn alternating_sign_pattern() {
        for p in poly_table(30).iter().skip(1) {
            for k in 1..=p.degree() {
                let c = p.coeff(k);
                assert_eq!(c.is_negative(), k % 2 == 1, "k={k}");
            }
        }
    }

    #[test]
    fn evaluation() {
        assert_eq!(poly_eval(&poly_recurrence(1), 5.0), -5.0);
        assert_eq!(poly_eval(&poly_recurrence(3), 2.0), -62.0);
        for n in 1..10 {
            assert_eq!(poly_eval(&poly_recurrence(n), 0.0), 0.0);
        }
        assert_eq!(poly_eval_horner(&poly_recurrence(3), 2.0), -62.0);
    }

    #[test]
    fn identities_small() {
        assert_eq!(scaled_triple_sum(2, 1), BigInt::zero());
        // k = n = 1: sum = -1 = (-1)^1 1! 1!!; scaled by 2^1
        assert_eq!(scaled_triple_sum(1, 1), BigInt::from(-2));
        let suite = verify_identities(20).unwrap();
        assert!(suite.all_passed(), "{:?}", suite.first_failure());
    }

    #[test]
    fn generating_function() {
        let r = generating_check(0.0, 0.9, 5, 1e-15).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert_eq!(r.rhs, 1.0);
        let r = generating_check(1.0, 0.5, 12, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        let r = generating_check(2.0, 1.0, 20, 1e-8).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(generating_check(1.0, 1.2, 20, 1e-8).is_err());
    }
}
