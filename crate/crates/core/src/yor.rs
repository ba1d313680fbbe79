//! The Yor integral `F_t(r)` (Hartman-Watson density kernel).
//!
//! Two independent routes are provided: the direct elementary integral over
//! `y` with the `sin(pi y / t)` factor, and the spectral form
//! `F_t(r) = 1/(r pi^2) int e^{-t tau^2/2} tau sinh(pi tau) K_{i tau}(r) dtau`.
//!
//! With this normalisation `int K_{i tau}(r) F_t(r) dr = e^{-t tau^2/2} / 2`.
//! On top of them sit the derivative formula in `t`, the diffusion equation,
//! the derivative bound, and the expansion over the polynomials `p_k`.
//!
//! Both routes lose roughly `pi^2 / (2t)` nats to cancellation, so public
//! evaluators refuse `t` outside [`T_MIN`, `T_MAX`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_k_imag, bessel_k_real, k_imag_noise, IMAG_ORDER_CAP};
use crate::error::{Error, Result};
use crate::kl::{self, HeatKernelForm, TestFunction};
use crate::polys::{poly_table, ExactPolynomial};
use crate::quadrature::{self, EvalResult, Oscillation, QuadratureSpec};
use crate::report::CrossCheckReport;

pub const T_MIN: f64 = 0.2;
pub const T_MAX: f64 = 10.0;
pub const R_MAX: f64 = 50.0;

/// Largest number of terms accepted by [`yor_polyseries`].
pub const POLYSERIES_MAX_TERMS: usize = 8;

/// Largest `t`-derivative order accepted.
pub const MAX_DERIVATIVE_ORDER: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Spectral,
    Polyseries,
}

/// `F_t(r)` with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub r: f64,
    pub t: f64,
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t < T_MIN {
        return Err(Error::SmallTime { t, min: T_MIN, max: T_MAX });
    }
    if t > T_MAX {
        return Err(Error::Window(format!("t = {t} exceeds {T_MAX}")));
    }
    Ok(())
}

fn check_point(r: f64, t: f64) -> Result<()> {
    check_time(t)?;
    if !(r > 0.0 && r <= R_MAX) {
        return Err(Error::Window(format!("r = {r} outside (0, {R_MAX}]")));
    }
    Ok(())
}

/// `e^{pi^2 / 2t} / sqrt(2 pi^3 t)`.
fn direct_prefactor(t: f64) -> f64 {
    (PI * PI / (2.0 * t)).exp() / (2.0 * PI.powi(3) * t).sqrt()
}

/// Direct route without window checks; any `r, t > 0`.
pub(crate) fn direct_value(r: f64, t: f64, spec: &QuadratureSpec) -> Result<EvalResult> {
    let pref = direct_prefactor(t);
    let raw_spec = spec.with_abs_tol(spec.abs_tol / pref);
    let envelope = |y: f64| (-y * y / (2.0 * t) - r * y.cosh()).exp() * y.sinh();
    // sinh y <= e^y / 2
    let damping = |y: f64| y * y / (2.0 * t) + r * y.cosh() - y;
    let res = quadrature::integrate_damped_oscillatory(envelope, PI / t, Oscillation::Sin, damping, &raw_spec)?;
    Ok(res.scaled(pref))
}

/// `F_t(r)` from the elementary `y`-integral.
pub fn yor_direct(r: f64, t: f64, spec: &QuadratureSpec) -> Result<DensityPoint> {
    check_point(r, t)?;
    let res = direct_value(r, t, spec)?;
    Ok(DensityPoint { r, t, value: res.value, method: Method::Direct, error_estimate: res.error_estimate })
}

/// Cut-off for the spectral integral: the positive root of
/// `t tau^2 / 2 - pi tau / 2 = D ln 10`.
pub fn spectral_cutoff(t: f64, decades: f64) -> f64 {
    let a = PI / (2.0 * t);
    a + (a * a + 2.0 * decades * std::f64::consts::LN_10 / t).sqrt()
}

/// Cut-off when the spectral weight carries an extra `tau^{2m}`.
fn spectral_cutoff_with_power(t: f64, m: u32, decades: f64) -> f64 {
    let mut tau = spectral_cutoff(t, decades);
    if m == 0 {
        return tau;
    }
    let a = PI / (2.0 * t);
    for _ in 0..50 {
        let extra = 2.0 * m as f64 * tau.max(1.0).ln();
        tau = a + (a * a + 2.0 * (decades * std::f64::consts::LN_10 + extra) / t).sqrt();
    }
    tau
}

/// `tau^{power} sinh(pi tau) e^{-t tau^2/2}`, formed without overflow.
pub(crate) fn spectral_weight(tau: f64, t: f64, power: i32) -> f64 {
    let g = -0.5 * t * tau * tau;
    0.5 * tau.powi(power) * ((PI * tau + g).exp() - (-PI * tau + g).exp())
}

/// `int_0^{cut} e^{-t tau^2/2} tau^{power} sinh(pi tau) K_{i tau}(r) dtau`.
pub(crate) fn spectral_integral(r: f64, t: f64, power: i32, cut: f64, spec: &QuadratureSpec) -> Result<EvalResult> {
    if cut > IMAG_ORDER_CAP {
        return Err(Error::Window(format!(
            "spectral cut-off {cut:.2} exceeds the imaginary-order cap {IMAG_ORDER_CAP}"
        )));
    }
    let f = |tau: f64| match bessel_k_imag(tau, r) {
        Ok(k) => spectral_weight(tau, t, power) * k,
        Err(_) => f64::NAN,
    };
    let breaks = spectral_breaks(cut);
    let floor = NOISE_MARGIN * weight_mass(|tau| spectral_weight(tau, t, power), &breaks)? * k_imag_noise(r);
    quadrature::integrate_panels(&f, &breaks, &spec.with_abs_tol(spec.abs_tol.max(floor)))
}

/// Factor between the propagated noise of `K_{i tau}` and the absolute
/// tolerance handed to a spectral integral.
pub(crate) const NOISE_MARGIN: f64 = 8.0;

/// Unit-width panels on `[0, cut]`, at least four.
pub(crate) fn spectral_breaks(cut: f64) -> Vec<f64> {
    let count = cut.ceil().max(4.0) as usize;
    (0..=count).map(|i| cut * i as f64 / count as f64).collect()
}

/// `int |w|` over the panels, to a loose tolerance.
pub(crate) fn weight_mass<W: Fn(f64) -> f64>(w: W, breaks: &[f64]) -> Result<f64> {
    let spec = QuadratureSpec::default().with_rel_tol(1e-4).with_abs_tol(1e-300);
    Ok(quadrature::integrate_panels(&|x| w(x).abs(), breaks, &spec)?.value)
}

/// Spectral route without window checks.
pub(crate) fn spectral_value(r: f64, t: f64, spec: &QuadratureSpec) -> Result<EvalResult> {
    let scale = 1.0 / (r * PI * PI);
    let raw_spec = spec.with_abs_tol(spec.abs_tol / scale);
    let cut = spectral_cutoff(t, spec.truncation_log_decades);
    Ok(spectral_integral(r, t, 1, cut, &raw_spec)?.scaled(scale))
}

/// `F_t(r)` from the spectral (inverse KL) form.
pub fn yor_spectral(r: f64, t: f64, spec: &QuadratureSpec) -> Result<DensityPoint> {
    check_point(r, t)?;
    let res = spectral_value(r, t, spec)?;
    Ok(DensityPoint { r, t, value: res.value, method: Method::Spectral, error_estimate: res.error_estimate })
}

/// `d^m F_t(r) / dt^m` from differentiating the spectral form under the
/// integral sign.
pub fn yor_dt_derivative(r: f64, t: f64, m: u32, spec: &QuadratureSpec) -> Result<f64> {
    check_point(r, t)?;
    if m > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!("derivative order {m} exceeds {MAX_DERIVATIVE_ORDER}")));
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let scale = sign * 2f64.powi(-(m as i32)) / (PI * PI) / r;
    let raw_spec = spec.with_abs_tol(spec.abs_tol / scale.abs());
    let cut = spectral_cutoff_with_power(t, m, spec.truncation_log_decades);
    Ok(spectral_integral(r, t, 2 * m as i32 + 1, cut, &raw_spec)?.value * scale)
}

/// `int_0^inf K_{i tau}(r) F_t(r) dr` against `e^{-t tau^2/2} / 2`.
pub fn yor_kl_image(tau: f64, t: f64, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    check_time(t)?;
    let lhs = kl::kl_forward(&TestFunction::Yor { t }, tau, spec)?;
    let rhs = 0.5 * (-0.5 * t * tau * tau).exp();
    Ok(CrossCheckReport::relative(format!("KL image of F_t tau={tau} t={t}"), lhs, rhs, 1e-6))
}

/// `e^{pi^2/4t} / (8 t sqrt(pi t))`.
pub fn squared_norm_closed_form(t: f64) -> f64 {
    (PI * PI / (4.0 * t)).exp() / (8.0 * t * (PI * t).sqrt())
}

/// `int_0^inf F_t(r)^2 r dr` against its closed form.
pub fn yor_squared_norm(t: f64, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    check_time(t)?;
    let lhs = kl::weighted_square_norm(&TestFunction::Yor { t }, spec)?;
    let rhs = squared_norm_closed_form(t);
    Ok(CrossCheckReport::relative(format!("squared norm t={t}"), lhs, rhs, 1e-5))
}

/// Step used for the `r`-derivatives in [`diffusion_residual`], relative to `r`.
pub const DIFFUSION_STEP: f64 = 1e-4;

/// Residual of `2 du/dt = r^2 u'' + r u' - r^2 u` for `u = r F_t(r)`.
///
/// The operator maps `K_{i tau}(r)` to `-tau^2 K_{i tau}(r)`, so it is `r F_t`
/// (the spectral integral without its `1/r`) that solves the equation.
/// `dF/dt` comes from the differentiated spectral form; the `r`-derivatives
/// from central differences of the spectral form with step `1e-4 r`. Passes
/// when the residual is at most `1e-4 max(1, |F|)`.
pub fn diffusion_residual(r: f64, t: f64) -> Result<CrossCheckReport> {
    check_point(r, t)?;
    let spec = QuadratureSpec::default().with_rel_tol(1e-13).with_abs_tol(1e-300);
    let h = DIFFUSION_STEP * r;
    let u = |x: f64| spectral_value(x, t, &spec).map(|e| x * e.value);
    let (u0, up, um) = (u(r)?, u(r + h)?, u(r - h)?);
    let d1 = (up - um) / (2.0 * h);
    let d2 = (up - 2.0 * u0 + um) / (h * h);
    let lhs = 2.0 * r * yor_dt_derivative(r, t, 1, &spec)?;
    let rhs = r * r * d2 + r * d1 - r * r * u0;
    let tol = 1e-4 * (u0 / r).abs().max(1.0);
    let mut report = CrossCheckReport::new(format!("diffusion residual r={r} t={t}"), lhs, rhs, tol);
    report.passed = report.abs_diff <= tol;
    Ok(report)
}

/// `Gamma(k + 1/2)` for integer `k >= 0`.
fn gamma_half_integer(k: u32) -> f64 {
    (0..k).fold(PI.sqrt(), |acc, j| acc * (j as f64 + 0.5))
}

/// Right side of the bound on `|d^m F_t(r) / dt^m|`.
pub fn derivative_bound(r: f64, t: f64, m: u32) -> Result<f64> {
    let k0 = bessel_k_real(0.0, 2.0 * r)?;
    let mf = m as f64;
    Ok(2f64.powf(0.25 - mf) * (PI * PI / t).exp() * k0.sqrt() * gamma_half_integer(4 * m + 2).powf(0.25)
        / (t.powf(mf + 0.75) * PI.powf(11.0 / 8.0)))
}

/// Check `|d^m F / dt^m| <= bound` at one point.
pub fn derivative_bound_check(r: f64, t: f64, m: u32) -> Result<CrossCheckReport> {
    let spec = QuadratureSpec::default();
    let d = yor_dt_derivative(r, t, m, &spec)?;
    let bound = derivative_bound(r, t, m)?;
    Ok(CrossCheckReport::upper_bound(format!("derivative bound r={r} t={t} m={m}"), d.abs(), bound))
}

/// The truncated expansion of `F_t(r)` over the polynomials `p_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySeries {
    pub point: DensityPoint,
    /// `(-1)^k pi^{2(k-1)} / (2 (2k-1)!) * a_k(r, t)` for `k = 1..=K`.
    pub terms: Vec<f64>,
    /// `a_k(r, t)` for `k = 1..=K`.
    pub coefficients: Vec<f64>,
    /// Geometric extrapolation of the dropped terms from the last ratio.
    pub tail_estimate: f64,
}

/// `a_k(r, t) = int_0^inf e^{-u} h_t(r, u) p_k(u) du / u`.
pub fn polyseries_coefficient(
    r: f64,
    t: f64,
    p: &ExactPolynomial,
    heat: &HeatKernelForm,
    spec: &QuadratureSpec,
) -> Result<f64> {
    // p_k(u) / u
    let q: Vec<f64> = p.coeffs_f64().into_iter().skip(1).collect();
    let deg = q.len() as f64;
    let f = |u: f64| {
        let qu = q.iter().rev().fold(0.0, |acc, c| acc * u + c);
        match kl::heat_kernel_value(t, r, u, heat, spec) {
            Ok(h) => h * (-u).exp() * qu,
            Err(_) => f64::NAN,
        }
    };
    // h_t(r, u) decays like e^{-u}; the u-Jacobian gives e^{s} at the origin
    let damping = move |s: f64| if s < 0.0 { -s } else { 2.0 * s.exp() - deg * s };
    Ok(quadrature::integrate_positive_axis(f, r.max(0.5), damping, spec)?.value)
}

/// `F_t(r)` from the first `K <= 8` terms of the expansion over `p_k`,
/// with the heat kernel in its translation form.
pub fn yor_polyseries(r: f64, t: f64, n_terms: usize) -> Result<PolySeries> {
    check_point(r, t)?;
    if !(1..=POLYSERIES_MAX_TERMS).contains(&n_terms) {
        return Err(Error::Domain(format!("number of terms must lie in 1..={POLYSERIES_MAX_TERMS}")));
    }
    let heat = HeatKernelForm::translation_sampled(t)?;
    let spec = QuadratureSpec::default().with_rel_tol(1e-8).with_abs_tol(1e-14);
    let table = poly_table(n_terms);
    let mut terms = Vec::with_capacity(n_terms);
    let mut coefficients = Vec::with_capacity(n_terms);
    let mut ln_fact = 0.0; // ln (2k-1)!
    for (k, p) in table.iter().enumerate().skip(1) {
        ln_fact += ((2 * k - 1) as f64).ln() + if k > 1 { ((2 * k - 2) as f64).ln() } else { 0.0 };
        let a = polyseries_coefficient(r, t, p, &heat, &spec)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let weight = 0.5 * (2.0 * (k as f64 - 1.0) * PI.ln() - ln_fact).exp();
        coefficients.push(a);
        terms.push(sign * weight * a);
    }
    let mut tail_estimate = 0.0;
    if n_terms >= 2 {
        let last = terms[n_terms - 1].abs();
        let prev = terms[n_terms - 2].abs();
        if last >= prev {
            return Err(Error::TruncationUnsound { k: n_terms });
        }
        let ratio = last / prev;
        tail_estimate = last * ratio / (1.0 - ratio);
    }
    let value: f64 = terms.iter().sum();
    Ok(PolySeries {
        point: DensityPoint { r, t, value, method: Method::Polyseries, error_estimate: tail_estimate },
        terms,
        coefficients,
        tail_estimate,
    })
}

/// `a_k(r, t)` with the `u`-integral taken first against the closed-form
/// KL image of `e^{-u} p_k(u) / u`:
/// `(-1)^k 2/(r pi) int_0^inf e^{-t tau^2/2} tau^{2k} K_{i tau}(r) dtau`.
pub fn polyseries_coefficient_spectral(r: f64, t: f64, k: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_point(r, t)?;
    let two_k = 2 * k as i32;
    let weight = |tau: f64| (-0.5 * t * tau * tau).exp() * tau.powi(two_k);
    // e^{-t tau^2/2} tau^{2k} < 10^{-D} beyond the cut
    let budget = spec.truncation_log_decades * std::f64::consts::LN_10;
    let mut cut = (2.0 * budget / t).sqrt().max(1.0);
    for _ in 0..8 {
        cut = (2.0 * (budget + two_k as f64 * cut.ln().max(0.0)) / t).sqrt();
    }
    if cut > IMAG_ORDER_CAP {
        return Err(Error::Window(format!("spectral cut-off {cut:.2} exceeds {IMAG_ORDER_CAP}")));
    }
    let scale = 2.0 / (r * PI);
    let f = |tau: f64| bessel_k_imag(tau, r).map_or(f64::NAN, |kv| weight(tau) * kv);
    let breaks = spectral_breaks(cut);
    let floor = NOISE_MARGIN * weight_mass(weight, &breaks)? * k_imag_noise(r);
    let raw = spec.with_abs_tol((spec.abs_tol / scale).max(floor));
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * scale * quadrature::integrate_panels(&f, &breaks, &raw)?.value)
}

/// The `k`-th expansion coefficient two ways: twice the KL convolution of
/// `e^{-r} p_k(r) / r` with `F_t`, and the spectral form of the heat-kernel
/// integral. Relative tolerance `1e-6`.
pub fn polyseries_term_identity(r: f64, t: f64, k: usize) -> Result<CrossCheckReport> {
    check_point(r, t)?;
    if !(1..=POLYSERIES_MAX_TERMS).contains(&k) {
        return Err(Error::Domain(format!("k must lie in 1..={POLYSERIES_MAX_TERMS}")));
    }
    let spec = QuadratureSpec::default().with_rel_tol(1e-9).with_abs_tol(1e-15);
    let f = TestFunction::poly_kernel(k);
    let h = TestFunction::yor_sampled(t)?;
    let conv = 2.0 * kl::kl_convolution(&f, &h, r, &spec)?;
    let coeff = polyseries_coefficient_spectral(r, t, k, &spec.with_rel_tol(1e-10).with_truncation(18.0))?;
    Ok(CrossCheckReport::relative(
        format!("expansion coefficient k={k} r={r} t={t}: convolution vs heat kernel"),
        conv,
        coeff,
        1e-6,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent arbitrary-precision quadrature of the direct integral.
    const F_1_1: f64 = 0.739_076_531_303_231_916_97;
    const F_05_05: f64 = 0.022_564_499_026_587_315_998;
    const F_2_05: f64 = 2.022_664_545_074_150_709_4;
    const F_10_05: f64 = 0.005_863_136_781_887_968_148_2;
    const F_1_2: f64 = 0.205_050_253_630_048_304_62;
    const F_5_2: f64 = 0.000_871_852_426_631_812_795_96;
    const F_1_10: f64 = 0.007_552_766_121_768_778_558_8;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn direct_matches_reference() {
        for &(r, t, v) in &[
            (1.0, 1.0, F_1_1),
            (0.5, 0.5, F_05_05),
            (2.0, 0.5, F_2_05),
            (10.0, 0.5, F_10_05),
            (1.0, 2.0, F_1_2),
            (5.0, 2.0, F_5_2),
            (1.0, 10.0, F_1_10),
        ] {
            let d = yor_direct(r, t, &spec()).unwrap();
            assert!(rel(d.value, v) < 1e-9, "r={r} t={t} {} vs {v}", d.value);
        }
    }

    #[test]
    fn spectral_matches_reference() {
        for &(r, t, v) in &[(1.0, 1.0, F_1_1), (0.5, 0.5, F_05_05), (5.0, 2.0, F_5_2), (1.0, 10.0, F_1_10)] {
            let s = yor_spectral(r, t, &spec()).unwrap();
            assert!(rel(s.value, v) < 1e-9, "r={r} t={t} {} vs {v}", s.value);
        }
    }

    #[test]
    fn window_guards() {
        assert!(matches!(yor_direct(1.0, 0.05, &spec()), Err(Error::SmallTime { .. })));
        assert!(matches!(yor_spectral(1.0, 11.0, &spec()), Err(Error::Window(_))));
        assert!(matches!(yor_direct(60.0, 1.0, &spec()), Err(Error::Window(_))));
        assert!(matches!(yor_direct(0.0, 1.0, &spec()), Err(Error::Window(_))));
    }

    #[test]
    fn large_r_is_small() {
        let v = yor_direct(40.0, 1.0, &spec()).unwrap().value;
        let cap = (PI * PI / 2.0).exp() * (-40.0f64).exp();
        assert!(v.abs() < cap);
    }

    #[test]
    fn cutoff_solves_quadratic() {
        for &t in &[0.5, 1.0, 3.0] {
            let tau = spectral_cutoff(t, 40.0);
            let lhs = 0.5 * t * tau * tau - 0.5 * PI * tau;
            assert!((lhs - 40.0 * std::f64::consts::LN_10).abs() < 1e-9);
        }
    }

    #[test]
    fn zeroth_derivative_is_spectral_value() {
        let d0 = yor_dt_derivative(1.0, 1.0, 0, &spec()).unwrap();
        let s = yor_spectral(1.0, 1.0, &spec()).unwrap().value;
        assert!(rel(d0, s) < 1e-12);
        assert!(yor_dt_derivative(1.0, 1.0, 5, &spec()).is_err());
    }

    #[test]
    fn time_derivatives_match_differences() {
        let h = 1e-4;
        let f = |t: f64| yor_spectral(1.0, t, &spec()).unwrap().value;
        let d1 = yor_dt_derivative(1.0, 1.0, 1, &spec()).unwrap();
        let fd1 = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
        assert!((d1 - fd1).abs() < 1e-6 * d1.abs().max(1.0), "{d1} {fd1}");

        let g = |t: f64| yor_spectral(2.0, t, &spec()).unwrap().value;
        let d2 = yor_dt_derivative(2.0, 1.0, 2, &spec()).unwrap();
        let hh = 1e-3;
        let fd2 = (g(1.0 + hh) - 2.0 * g(1.0) + g(1.0 - hh)) / (hh * hh);
        assert!((d2 - fd2).abs() < 1e-4 * d2.abs().max(1.0), "{d2} {fd2}");
    }

    #[test]
    fn bound_examples() {
        assert!(derivative_bound_check(1.0, 1.0, 0).unwrap().passed);
        assert!(derivative_bound_check(2.0, 1.0, 1).unwrap().passed);
        let near = derivative_bound(10.0, 1.0, 0).unwrap();
        let far = derivative_bound(1.0, 1.0, 0).unwrap();
        let k_ratio = (bessel_k_real(0.0, 20.0).unwrap() / bessel_k_real(0.0, 2.0).unwrap()).sqrt();
        assert!(rel(near / far, k_ratio) < 1e-12);
    }

    #[test]
    fn gamma_half_values() {
        assert!(rel(gamma_half_integer(0), PI.sqrt()) < 1e-15);
        assert!(rel(gamma_half_integer(3), 15.0 / 8.0 * PI.sqrt()) < 1e-15);
    }

    #[test]
    fn diffusion_at_unit_point() {
        let r = diffusion_residual(1.0, 1.0).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
