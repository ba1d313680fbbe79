use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureSpec};
use crate::report::CrossCheckReport;

/// Largest index accepted by [`bernoulli_exact`].
pub const BERNOULLI_CAP: usize = 400;

/// `B_0, ..., B_{k_max}` from `sum_{j=0}^{m} C(m+1, j) B_j = 0`
/// (so `B_1 = -1/2`).
pub fn bernoulli_numbers(k_max: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(k_max + 1);
    b.push(BigRational::one());
    for m in 1..=k_max {
        if m > 1 && m % 2 == 1 {
            b.push(BigRational::zero());
            continue;
        }
        // C(m+1, j) built incrementally
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                acc += bj * BigRational::from_integer(binom.clone());
            }
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Exact `B_k` for even `2 <= k <= 400`.
pub fn bernoulli_exact(k: usize) -> Result<BigRational> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::Domain(format!("Bernoulli index must be even and at least 2, got {k}")));
    }
    if k > BERNOULLI_CAP {
        return Err(Error::Domain(format!("Bernoulli index {k} exceeds the cap {BERNOULLI_CAP}")));
    }
    Ok(bernoulli_numbers(k).swap_remove(k))
}

/// `int_0^inf tau^{4n-1} / sinh(tau) dtau` against
/// `-B_{4n} (2^{4n} - 1) pi^{4n} / (4n)`, relative tolerance `1e-8`.
pub fn verify_bernoulli_integral(n: usize) -> Result<CrossCheckReport> {
    if !(1..=10).contains(&n) {
        return Err(Error::Domain(format!("n must lie in 1..=10, got {n}")));
    }
    let power = (4 * n - 1) as f64;
    let f = |tau: f64| {
        if tau < 1.0 {
            tau.powf(power) / tau.sinh()
        } else {
            2.0 * (power * tau.ln() - tau).exp() / -(-2.0 * tau).exp_m1()
        }
    };
    // peak of tau^p e^{-tau} at tau = p
    let damping = |tau: f64| if tau <= 1.0 { 0.0 } else { tau - power * tau.ln() };
    let spec = QuadratureSpec::default().with_rel_tol(1e-13).with_abs_tol(1e-300);
    let lhs = quadrature::integrate_semi_infinite(f, 0.0, damping, &spec)?.value;

    let b = bernoulli_exact(4 * n)?.to_f64().unwrap_or(f64::NAN);
    let m = 4 * n;
    let rhs = -b * (2f64.powi(m as i32) - 1.0) * std::f64::consts::PI.powi(m as i32) / m as f64;
    Ok(CrossCheckReport::relative(format!("bernoulli integral n={n}"), lhs, rhs, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_values() {
        assert_eq!(bernoulli_exact(2).unwrap(), ratio(1, 6));
        assert_eq!(bernoulli_exact(4).unwrap(), ratio(-1, 30));
        assert_eq!(bernoulli_exact(8).unwrap(), ratio(-1, 30));
        assert_eq!(bernoulli_exact(12).unwrap(), ratio(-691, 2730));
        assert_eq!(bernoulli_numbers(1)[1], ratio(-1, 2));
    }

    #[test]
    fn matches_zeta_formula() {
        // |B_{2m}| = 2 (2m)! zeta(2m) / (2 pi)^{2m}
        for &m in &[4usize, 10, 20] {
            let b = bernoulli_exact(2 * m).unwrap().to_f64().unwrap();
            let zeta: f64 = (1..200).map(|k| (k as f64).powi(-(2 * m as i32))).sum();
            let fact: f64 = (1..=2 * m).map(|k| k as f64).product();
            let expected = 2.0 * fact * zeta / (2.0 * std::f64::consts::PI).powi(2 * m as i32);
            assert!((b.abs() - expected).abs() / expected < 1e-13, "m={m}");
        }
    }

    #[test]
    fn rejects_odd_and_large() {
        assert!(bernoulli_exact(3).is_err());
        assert!(bernoulli_exact(0).is_err());
        assert!(bernoulli_exact(402).is_err());
    }

    #[test]
    fn integral_formula() {
        let r = verify_bernoulli_integral(1).unwrap();
        let pi4 = std::f64::consts::PI.powi(4);
        assert!((r.rhs - pi4 / 8.0).abs() < 1e-12 * r.rhs);
        for n in 1..=3 {
            let r = verify_bernoulli_integral(n).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }
}
