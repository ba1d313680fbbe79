//! Analytic facts about `p_n` that need floating point: the Bessel series,
//! the growth bound, the large-`n` main term, and the KL image.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{poly_eval, poly_recurrence, poly_table};
use crate::bessel::{bessel_i_int, bessel_k_imag, IMAG_ORDER_CAP};
use crate::error::{Error, Result};
use crate::quadrature::{self, QuadratureSpec};
use crate::report::CrossCheckReport;

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `(epsilon, alpha)` of the growth bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    epsilon: f64,
    alpha: f64,
}

impl BoundParams {
    /// Requires `epsilon` in `(1 - sqrt(3)/2, 1]` and `alpha` in
    /// `(0, alpha_max(epsilon)]`.
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self> {
        let lower = 1.0 - 3f64.sqrt() / 2.0;
        if !(epsilon > lower && epsilon <= 1.0) {
            return Err(Error::Domain(format!("epsilon = {epsilon} outside ({lower}, 1]")));
        }
        let max = Self::alpha_max(epsilon);
        // the endpoint is admissible; allow for rounding in its computation
        if !(alpha > 0.0 && alpha <= max * (1.0 + 4.0 * f64::EPSILON)) {
            return Err(Error::Domain(format!("alpha = {alpha} outside (0, {max}] for epsilon = {epsilon}")));
        }
        Ok(Self { epsilon, alpha })
    }

    /// `2 arccos(sqrt(1 + 4 (1 - epsilon)^2) / 2)`.
    pub fn alpha_max(epsilon: f64) -> f64 {
        let d = 1.0 - epsilon;
        2.0 * ((1.0 + 4.0 * d * d).sqrt() / 2.0).min(1.0).acos()
    }

    /// Parameters at the upper end of the admissible `alpha` range.
    pub fn at_endpoint(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Self::alpha_max(epsilon))
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Right side of the growth inequality for `|p_n(x)|`.
pub fn poly_bound(n: usize, x: f64, params: &BoundParams) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("the bound is stated for n >= 1".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    Ok(ln_poly_bound(n, params).exp() * (params.epsilon * x).exp() / 2.0)
}

/// Logarithm of the `x`-independent factor of the bound.
fn ln_poly_bound(n: usize, params: &BoundParams) -> f64 {
    let nf = n as f64;
    let m = 4 * n;
    let a = params.alpha;
    let ln_num = (2f64.powi(m as i32) - 1.0).ln() + ln_factorial(m) + (0.5 * a).sin().ln();
    let ln_den = (PI * nf).ln() + m as f64 * a.ln() + (2f64.powi(m as i32 - 2) + 6.0 / (PI * PI) - 1.0).ln();
    0.5 * (ln_num - ln_den)
}

/// Bound on `sum_{n > n_terms} |p_n(x)| t^{2n} / (2n)!` from the growth
/// inequality; infinite when the bounds do not give a convergent series.
pub(crate) fn generating_tail_bound(x: f64, t: f64, n_terms: usize, params: &BoundParams) -> f64 {
    if 2.0 * t.abs() >= params.alpha {
        return f64::INFINITY;
    }
    let ln_t = t.abs().ln();
    let mut total = 0.0;
    for n in n_terms + 1..n_terms + 2000 {
        let ln_term = ln_poly_bound(n, params) + params.epsilon * x - 2f64.ln() + 2.0 * n as f64 * ln_t
            - ln_factorial(2 * n);
        let term = ln_term.exp();
        total += term;
        if term < 1e-18 * total {
            break;
        }
    }
    total
}

/// A truncated series and an estimate of what was dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    pub tail_estimate: f64,
    pub terms_used: usize,
}

/// Index near which `m^{2n} I_m(x)` peaks.
pub fn series_peak_index(n: usize, x: f64) -> usize {
    (2 * n).max((std::f64::consts::E * x / 2.0).ceil() as usize)
}

/// `2 e^x sum_{m=1}^{M} (-1)^m m^{2n} I_m(x)`.
///
/// Summation stops once `m` is past the peak index and the terms fall below
/// `1e-16` of the partial sum; `M` below the peak index is refused.
pub fn poly_series_bessel(n: usize, x: f64, m_max: usize) -> Result<SeriesSum> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let peak = series_peak_index(n, x);
    if m_max < peak {
        return Err(Error::InsufficientTruncation { m: m_max, peak });
    }
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut used = 0;
    for m in 1..=m_max {
        let mag = (m as f64).powi(2 * n as i32) * bessel_i_int(m as u32, x);
        let term = if m % 2 == 0 { mag } else { -mag };
        sum += term;
        last = term;
        used = m;
        if m >= peak && term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    let scale = 2.0 * x.exp();
    Ok(SeriesSum { value: scale * sum, tail_estimate: scale * last.abs(), terms_used: used })
}

/// Main term `6x (-1)^n sin(beta) (2n)! e^x / (pi beta^{2n} (2n+1)^3)`.
pub fn asymptotic_main_term(n: usize, x: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let ln_mag = (6.0 * x * beta.sin()).ln() + ln_factorial(2 * n) + x
        - PI.ln()
        - 2.0 * n as f64 * beta.ln()
        - 3.0 * ((2 * n + 1) as f64).ln();
    Ok(sign * ln_mag.exp())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < PI / 2.0) {
        return Err(Error::Domain(format!("beta = {beta} outside (0, pi/2)")));
    }
    Ok(())
}

/// `p_n(x)` divided by the large-`n` main term.
pub fn poly_asymptotic_ratio(n: usize, x: f64, beta: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    check_beta(beta)?;
    let p = poly_eval(&poly_recurrence(n), x);
    Ok(p / asymptotic_main_term(n, x, beta)?)
}

/// One row of the ratio study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    pub beta: f64,
    pub p_n: f64,
    pub main_term: f64,
    pub ratio: f64,
    /// `ratio(n) / ratio(n - 1)`; absent for the first row of each `beta`.
    pub step: Option<f64>,
}

/// Ratios `p_n(x) / main term` for `n = 1..=n_max` and every `beta`.
pub fn asymptotic_ratio_study(x: f64, betas: &[f64], n_max: usize) -> Result<Vec<RatioRow>> {
    let table = poly_table(n_max);
    let mut rows = Vec::new();
    for &beta in betas {
        check_beta(beta)?;
        let mut prev: Option<f64> = None;
        for (n, p) in table.iter().enumerate().skip(1) {
            let p_n = poly_eval(p, x);
            let main_term = asymptotic_main_term(n, x, beta)?;
            let ratio = p_n / main_term;
            rows.push(RatioRow { n, beta, p_n, main_term, ratio, step: prev.map(|q| ratio / q) });
            prev = Some(ratio);
        }
    }
    Ok(rows)
}

/// `int_0^inf K_{i tau}(x) e^{-x} p_n(x) dx / x` against
/// `(-1)^n pi tau^{2n-1} / sinh(pi tau)`, relative tolerance `1e-6`.
pub fn poly_kl_image(n: usize, tau: f64) -> Result<CrossCheckReport> {
    if !(1..=10).contains(&n) {
        return Err(Error::Domain(format!("n must lie in 1..=10, got {n}")));
    }
    if !(tau > 0.0 && tau <= IMAG_ORDER_CAP) {
        return Err(Error::Domain(format!("tau must lie in (0, {IMAG_ORDER_CAP}], got {tau}")));
    }
    let p = poly_recurrence(n);
    // p_n(x) / x, exact since p_n(0) = 0
    let q: Vec<f64> = p.coeffs_f64().into_iter().skip(1).collect();
    let q_eval = |x: f64| q.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let f = |x: f64| bessel_k_imag(tau, x).map(|k| k * (-x).exp() * q_eval(x)).unwrap_or(f64::NAN);
    let nf = n as f64;
    // |K| <= K_0 ~ ln(1/x) near 0, p_n(x)/x ~ x^{n-1} e^{-x} at infinity
    let damping = |s: f64| {
        if s < 0.0 {
            -s - (2.0 - s).ln()
        } else {
            2.0 * s.exp() - nf * s
        }
    };
    let spec = QuadratureSpec::default().with_rel_tol(1e-9).with_abs_tol(1e-15);
    let lhs = quadrature::integrate_positive_axis(f, 1.0, damping, &spec)?.value;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = sign * PI * tau.powi(2 * n as i32 - 1) / (PI * tau).sinh();
    Ok(CrossCheckReport::relative(format!("KL image of p_n n={n} tau={tau}"), lhs, rhs, 1e-6))
}
