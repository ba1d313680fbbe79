//! Modified Bessel functions `K_nu(x)` (real order), `K_{i tau}(x)` (imaginary
//! order) and `I_m(x)` (integer order).
//!
//! Both `K` evaluators integrate `exp(-x cosh u)` against `cosh(nu u)` or
//! `cos(tau u)` over `u >= 0`. Imaginary order keeps everything real; the
//! cosine factor goes through the oscillatory panel rule of the quadrature
//! module. `I_m` is the ascending power series.

use crate::error::{Error, Result};
use crate::quadrature::{self, Oscillation, QuadratureSpec};
use crate::report::{CheckSuite, CrossCheckReport};

/// Largest real order accepted by [`bessel_k_real`].
pub const REAL_ORDER_CAP: f64 = 60.0;

/// Largest imaginary order accepted by [`bessel_k_imag`].
pub const IMAG_ORDER_CAP: f64 = 100.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Order-of-magnitude estimate of `K_0(x)`, used to set the absolute
/// tolerance of the oscillatory integral. Within a factor of ~4 everywhere.
pub(crate) fn k0_scale(x: f64) -> f64 {
    let large = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 - 1.0 / (8.0 * x)).max(0.5);
    if x >= 1.0 {
        large
    } else {
        large.max(-(0.5 * x).ln() - EULER_GAMMA)
    }
}

/// Quadrature settings for the kernel integrals: positive integrands only
/// need a relative tolerance.
fn positive_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-14).with_abs_tol(1e-300)
}

/// Settings for the cosine integral: absolute accuracy near rounding level of
/// `K_0(x)`, which bounds the integrand mass.
fn oscillatory_spec(x: f64) -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-13).with_abs_tol(k_imag_noise(x))
}

/// Absolute accuracy of [`bessel_k_imag`] at `x`, independent of `tau`.
///
/// The cosine integral cancels down from `K_0(x)` to `~e^{-pi tau/2}`, so
/// relative accuracy is lost as `tau` grows; callers that weight `K_{i tau}`
/// by `sinh(pi tau)` use this to set their own absolute tolerance.
pub fn k_imag_noise(x: f64) -> f64 {
    4e-16 * k0_scale(x)
}

fn check_argument(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `K_nu(x)` for real `0 <= nu <= 60`.
pub fn bessel_k_real(nu: f64, x: f64) -> Result<f64> {
    check_argument(x)?;
    if !(nu >= 0.0) {
        return Err(Error::Domain(format!("order must be non-negative, got {nu}")));
    }
    if nu > REAL_ORDER_CAP {
        return Err(Error::OrderTooLarge { order: nu, cap: REAL_ORDER_CAP });
    }
    // Peak of exp(nu u - x cosh u) sits at sinh u = nu / x.
    let u_peak = (nu / x).asinh();
    let log_peak = nu * u_peak - x * u_peak.cosh();
    if log_peak > 700.0 {
        return Err(Error::OrderTooLarge { order: nu, cap: REAL_ORDER_CAP });
    }
    let f = |u: f64| {
        let c = x * u.cosh();
        0.5 * ((nu * u - c - log_peak).exp() + (-nu * u - c - log_peak).exp())
    };
    let damping = |u: f64| x * u.cosh() - nu * u;
    let r = quadrature::integrate_semi_infinite(f, 0.0, damping, &positive_spec())?;
    Ok(r.value * log_peak.exp())
}

/// `K_{i tau}(x)` for `0 <= tau <= 100`.
pub fn bessel_k_imag(tau: f64, x: f64) -> Result<f64> {
    check_argument(x)?;
    check_imag_order(tau)?;
    let r = quadrature::integrate_damped_oscillatory_capped(
        |u| (-x * u.cosh()).exp(),
        tau,
        Oscillation::Cos,
        |u| x * u.cosh(),
        &oscillatory_spec(x),
        IMAG_ORDER_CAP,
    )?;
    Ok(r.value)
}

/// `d/dx K_{i tau}(x) = -int_0^inf cosh(u) exp(-x cosh u) cos(tau u) du`.
pub fn bessel_k_imag_dx(tau: f64, x: f64) -> Result<f64> {
    check_argument(x)?;
    check_imag_order(tau)?;
    let scale = bessel_k_real(1.0, x)?;
    let spec = QuadratureSpec::default().with_rel_tol(1e-13).with_abs_tol(1e-16 * scale);
    let r = quadrature::integrate_damped_oscillatory_capped(
        |u| -u.cosh() * (-x * u.cosh()).exp(),
        tau,
        Oscillation::Cos,
        |u| x * u.cosh() - u,
        &spec,
        IMAG_ORDER_CAP,
    )?;
    Ok(r.value)
}

fn check_imag_order(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("imaginary order must be non-negative, got {tau}")));
    }
    if tau > IMAG_ORDER_CAP {
        return Err(Error::FrequencyCap { omega: tau, cap: IMAG_ORDER_CAP });
    }
    Ok(())
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `I_m(x)` for integer `m >= 0` by the ascending series.
pub fn bessel_i_int(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let sign = if x < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
    let half = 0.5 * x.abs();
    let log_head = m as f64 * half.ln() - ln_factorial(m);
    if log_head < -745.0 {
        return 0.0;
    }
    let mut term = log_head.exp();
    let mut sum = term;
    let q = half * half;
    for k in 1..500u32 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term < 1e-17 * sum && k as f64 > half {
            break;
        }
    }
    sign * sum
}

/// Compare `K_0` with its large- and small-argument behavior on `x_grid`.
///
/// Points with `x >= 5` are compared with `sqrt(pi / 2x) e^{-x}`, tolerance
/// `1/(4x)`; smaller points with `-ln x`, requiring the difference to stay
/// below 0.25 (the bounded remainder tends to `ln 2 - gamma`).
pub fn check_k_asymptotics(x_grid: &[f64]) -> Result<CheckSuite> {
    let mut suite = CheckSuite::new("bessel-asymptotics");
    for &x in x_grid {
        let k0 = bessel_k_real(0.0, x)?;
        if x >= 5.0 {
            let asym = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            suite.push(CrossCheckReport::relative(format!("K0 large-x x={x}"), k0, asym, 0.25 / x));
        } else {
            suite.push(CrossCheckReport::new(format!("K0 small-x x={x}"), k0, -x.ln(), 0.25));
        }
    }
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // 30-digit reference values from an independent arbitrary-precision
    // evaluation of the same integrals.
    const K0_1: f64 = 0.421_024_438_240_708_333_335_627;
    const K1_1: f64 = 0.601_907_230_197_234_574_737_540;
    const KI1_1: f64 = 0.289_428_037_025_992_127_634_567;
    const KI2_001: f64 = -0.073_834_841_938_384_282_526_316;
    const K0_1EM6: f64 = 13.931_442_073_626_419_413_437_1;
    const I1_2: f64 = 1.590_636_854_637_329_063_382_254;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn real_order_values() {
        assert!(rel(bessel_k_real(0.0, 1.0).unwrap(), K0_1) < 1e-13);
        assert!(rel(bessel_k_real(1.0, 1.0).unwrap(), K1_1) < 1e-13);
        let half = bessel_k_real(0.5, 2.0).unwrap();
        assert!(rel(half, (PI / 4.0).sqrt() * (-2.0f64).exp()) < 1e-13);
        assert!(rel(bessel_k_real(0.0, 1e-6).unwrap(), K0_1EM6) < 1e-12);
    }

    #[test]
    fn large_argument_within_one_percent() {
        let k = bessel_k_real(0.0, 30.0).unwrap();
        assert!(rel(k, (PI / 60.0).sqrt() * (-30.0f64).exp()) < 0.01);
    }

    #[test]
    fn real_order_cap() {
        assert!(matches!(bessel_k_real(61.0, 1.0), Err(Error::OrderTooLarge { .. })));
        assert!(matches!(bessel_k_real(0.0, 0.0), Err(Error::Domain(_))));
        // large order at small argument overflows
        assert!(matches!(bessel_k_real(60.0, 1e-8), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn imaginary_order_values() {
        assert_eq!(bessel_k_imag(0.0, 1.0).unwrap(), bessel_k_imag(0.0, 1.0).unwrap());
        assert!(rel(bessel_k_imag(0.0, 1.0).unwrap(), K0_1) < 1e-13);
        assert!(rel(bessel_k_imag(1.0, 1.0).unwrap(), KI1_1) < 1e-12);
        let k = bessel_k_imag(2.0, 0.01).unwrap();
        assert!(rel(k, KI2_001) < 1e-11);
        assert!(k.abs() < bessel_k_real(0.0, 0.01).unwrap());
    }

    #[test]
    fn imaginary_order_cap() {
        assert!(matches!(bessel_k_imag(101.0, 1.0), Err(Error::FrequencyCap { .. })));
    }

    #[test]
    fn bounded_by_k0() {
        for &x in &[0.05, 0.5, 1.0, 3.0, 10.0] {
            let k0 = bessel_k_real(0.0, x).unwrap();
            for &tau in &[0.3, 1.0, 2.5, 7.0, 15.0] {
                assert!(bessel_k_imag(tau, x).unwrap().abs() <= k0);
            }
        }
    }

    #[test]
    fn oscillates_in_log_argument_near_origin() {
        // bounded and changing sign as x decreases geometrically
        let values: Vec<f64> = (2..12).map(|k| bessel_k_imag(2.0, 10f64.powi(-k)).unwrap()).collect();
        assert!(values.iter().all(|v| v.abs() < 2.0));
        assert!(values.windows(2).any(|w| w[0].signum() != w[1].signum()));
    }

    #[test]
    fn derivative_matches_difference_and_bound() {
        for &(tau, x) in &[(0.5, 0.7), (1.0, 1.0), (3.0, 2.0), (6.0, 0.4)] {
            let d = bessel_k_imag_dx(tau, x).unwrap();
            let h = 1e-4 * x;
            let fd = (bessel_k_imag(tau, x + h).unwrap() - bessel_k_imag(tau, x - h).unwrap()) / (2.0 * h);
            assert!((d - fd).abs() < 1e-7 * (1.0 + d.abs()), "tau={tau} x={x} d={d} fd={fd}");
            for delta in [0.0, PI / 4.0] {
                let bound = (-delta * tau).exp() * bessel_k_real(1.0, x * f64::cos(delta)).unwrap();
                assert!(d.abs() <= bound, "tau={tau} x={x} delta={delta}");
            }
        }
    }

    #[test]
    fn integer_order_series() {
        assert_eq!(bessel_i_int(0, 0.0), 1.0);
        assert_eq!(bessel_i_int(3, 0.0), 0.0);
        assert!(rel(bessel_i_int(1, 2.0), I1_2) < 1e-15);
        assert!((bessel_i_int(3, -1.5) + bessel_i_int(3, 1.5)).abs() < 1e-16);
        assert_eq!(bessel_i_int(2, -1.5), bessel_i_int(2, 1.5));
        assert_eq!(bessel_i_int(400, 1.0), 0.0);
    }

    #[test]
    fn integer_order_recurrence() {
        // I_{m-1}(x) - I_{m+1}(x) = (2m/x) I_m(x)
        for &x in &[0.3, 2.0, 11.0, 40.0] {
            for m in 1..20u32 {
                let lhs = bessel_i_int(m - 1, x) - bessel_i_int(m + 1, x);
                let rhs = 2.0 * m as f64 / x * bessel_i_int(m, x);
                assert!(rel(lhs, rhs) < 1e-12, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn asymptotic_report() {
        let large = check_k_asymptotics(&[10.0, 20.0, 40.0]).unwrap();
        assert!(large.all_passed());
        let errs: Vec<f64> = large.checks.iter().map(|c| c.rel_diff).collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);

        let small = check_k_asymptotics(&[1e-2, 1e-3, 1e-4]).unwrap();
        assert!(small.all_passed());

        let tiny = bessel_k_real(0.0, 1e-6).unwrap();
        assert!((tiny / -(1e-6f64).ln() - 1.0).abs() < 0.1);
    }
}
