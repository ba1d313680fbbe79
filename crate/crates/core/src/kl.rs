//! The Kontorovich-Lebedev transform `(Gf)(tau) = int_0^inf K_{i tau}(r) f(r) dr`,
//! its inverse, the Parseval identity, the convolution ring, the Macdonald
//! product formula and the heat kernel.
//!
//! Multiple integrals are iterated one-dimensional adaptive quadratures with
//! the inner tolerance a tenth of the outer one.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_k_imag, bessel_k_real, k0_scale, k_imag_noise, IMAG_ORDER_CAP, REAL_ORDER_CAP};
use crate::error::{Error, Result};
use crate::polys::poly_recurrence;
use crate::quadrature::{self, EvalResult, Oscillation, QuadratureSpec};
use crate::report::CrossCheckReport;
use crate::yor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    /// Piecewise linear in `r`.
    Linear,
    /// Natural cubic spline in `ln r + r`.
    Cubic,
}

/// Behaviour beyond the last sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailModel {
    Zero,
    Exponential { rate: f64 },
}

/// A function known on a grid, with a declared tail.
///
/// Below the first abscissa the first value is held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
    tail: TailModel,
    knots: Vec<f64>,
    second: Vec<f64>,
}

fn spline_variable(r: f64) -> f64 {
    r.ln() + r
}

/// Second derivatives of the natural cubic spline through `(x, y)`.
fn natural_spline(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // tridiagonal solve for interior second derivatives
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = 2.0 * (h0 + h1);
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for i in 2..n - 1 {
        let h = x[i] - x[i - 1];
        let w = h / diag[i - 1];
        diag[i] -= w * h;
        rhs[i] -= w * rhs[i - 1];
    }
    for i in (1..n - 1).rev() {
        let upper = if i + 1 < n - 1 { (x[i + 1] - x[i]) * m[i + 1] } else { 0.0 };
        m[i] = (rhs[i] - upper) / diag[i];
    }
    m
}

impl SampledFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, interpolation: Interpolation, tail: TailModel) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidSpec(format!(
                "grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        let min_len = match interpolation {
            Interpolation::Linear => 2,
            Interpolation::Cubic => 4,
        };
        if grid.len() < min_len {
            return Err(Error::InvalidSpec(format!("need at least {min_len} samples")));
        }
        if !(grid[0] > 0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidSpec("grid must be positive and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("sample values must be finite".into()));
        }
        if let TailModel::Exponential { rate } = tail {
            if !(rate > 0.0) || !rate.is_finite() {
                return Err(Error::InvalidSpec(format!("exponential tail rate must be positive, got {rate}")));
            }
        }
        let knots: Vec<f64> = grid.iter().map(|&r| spline_variable(r)).collect();
        let second = match interpolation {
            Interpolation::Linear => Vec::new(),
            Interpolation::Cubic => natural_spline(&knots, &values),
        };
        Ok(Self { grid, values, interpolation, tail, knots, second })
    }

    /// Tabulate `f` on `grid`.
    pub fn from_fn<F: Fn(f64) -> f64>(
        f: F,
        grid: Vec<f64>,
        interpolation: Interpolation,
        tail: TailModel,
    ) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values, interpolation, tail)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.grid.len();
        if r <= self.grid[0] {
            return self.values[0];
        }
        let last = self.grid[n - 1];
        if r >= last {
            return match self.tail {
                TailModel::Zero => {
                    if r == last {
                        self.values[n - 1]
                    } else {
                        0.0
                    }
                }
                TailModel::Exponential { rate } => self.values[n - 1] * (-rate * (r - last)).exp(),
            };
        }
        let i = self.grid.partition_point(|&g| g <= r).clamp(1, n - 1);
        match self.interpolation {
            Interpolation::Linear => {
                let (x0, x1) = (self.grid[i - 1], self.grid[i]);
                let w = (r - x0) / (x1 - x0);
                self.values[i - 1] * (1.0 - w) + self.values[i] * w
            }
            Interpolation::Cubic => {
                let (x0, x1) = (self.knots[i - 1], self.knots[i]);
                let h = x1 - x0;
                let z = spline_variable(r);
                let a = (x1 - z) / h;
                let b = 1.0 - a;
                a * self.values[i - 1]
                    + b * self.values[i]
                    + ((a * a * a - a) * self.second[i - 1] + (b * b * b - b) * self.second[i]) * h * h / 6.0
            }
        }
    }

    /// Compare the declared tail with the decay visible in the last samples.
    ///
    /// An exponential tail must match the observed rate within a factor of 2
    /// and the last samples must not change sign; a zero tail requires the last
    /// sample to be negligible against the largest.
    pub fn check_tail(&self) -> Result<()> {
        let n = self.values.len();
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        match self.tail {
            TailModel::Zero => {
                if self.values[n - 1].abs() > 1e-12 * peak {
                    return Err(Error::TailModel(format!(
                        "zero tail declared but the last sample is {:e} against a peak of {peak:e}",
                        self.values[n - 1]
                    )));
                }
            }
            TailModel::Exponential { rate } => {
                let (v0, v1) = (self.values[n - 2], self.values[n - 1]);
                if v1 == 0.0 || v0 == 0.0 || v0.signum() != v1.signum() {
                    return Err(Error::TailModel("exponential tail declared but the last samples change sign".into()));
                }
                let observed = (v0 / v1).ln() / (self.grid[n - 1] - self.grid[n - 2]);
                if !(observed >= 0.5 * rate && observed <= 2.0 * rate) {
                    return Err(Error::TailModel(format!(
                        "declared decay rate {rate} against observed {observed:.4}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Abscissae uniform in `ln r + r` from `r_min` to `r_max`.
pub fn yor_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    let (z0, z1) = (spline_variable(r_min), spline_variable(r_max));
    (0..n)
        .map(|i| {
            let z = z0 + (z1 - z0) * i as f64 / (n - 1) as f64;
            // Newton on ln r + r = z
            let mut r = if z < 0.0 { z.exp() } else { z.max(1.0) - z.max(1.0).ln() + 0.5 };
            for _ in 0..60 {
                let step = (r.ln() + r - z) * r / (1.0 + r);
                r = (r - step).max(0.5 * r);
                if step.abs() < 1e-15 * r {
                    break;
                }
            }
            r
        })
        .collect()
}

/// Samples used by [`TestFunction::yor_sampled`].
pub const YOR_SAMPLES: usize = 2000;
const YOR_SAMPLE_MIN: f64 = 1e-8;
const YOR_SAMPLE_MAX: f64 = 60.0;

/// `F_t` tabulated with the direct route and a cubic spline, with an
/// exponential tail of rate 1.
pub fn sample_yor(t: f64, n: usize) -> Result<SampledFunction> {
    yor::check_time(t)?;
    let spec = QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-18);
    let grid = yor_grid(YOR_SAMPLE_MIN, YOR_SAMPLE_MAX, n);
    let mut values = Vec::with_capacity(n);
    for &r in &grid {
        values.push(yor::direct_value(r, t, &spec)?.value);
    }
    let s = SampledFunction::new(grid, values, Interpolation::Cubic, TailModel::Exponential { rate: 1.0 })?;
    s.check_tail()?;
    Ok(s)
}

/// A user-supplied integrand with its declared behaviour at both ends.
#[derive(Clone)]
pub struct CustomFunction {
    pub label: String,
    pub f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `|f(r)| <= C e^{-rate r}` for large `r`.
    pub decay_rate: f64,
    /// `|f(r)| <= C r^p` near the origin.
    pub origin_exponent: f64,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("label", &self.label)
            .field("decay_rate", &self.decay_rate)
            .field("origin_exponent", &self.origin_exponent)
            .finish()
    }
}

/// Functions on `(0, inf)` fed to the transform, norms and convolution.
#[derive(Debug, Clone)]
pub enum TestFunction {
    Constant(f64),
    /// `e^{-rate r}`.
    Exponential { rate: f64 },
    /// `e^{-r} p_n(r) / r`, with the coefficients of `p_n(r) / r`.
    PolyKernel { n: usize, coeffs: Vec<f64> },
    /// `F_t` through the direct route at every node.
    Yor { t: f64 },
    Sampled(Arc<SampledFunction>),
    Custom(CustomFunction),
}

fn inner_yor_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-18)
}

impl TestFunction {
    pub fn poly_kernel(n: usize) -> Self {
        let p = poly_recurrence(n);
        let coeffs = p.coeffs_f64().into_iter().skip(1).collect();
        TestFunction::PolyKernel { n, coeffs }
    }

    /// `F_t` tabulated on [`YOR_SAMPLES`] points.
    pub fn yor_sampled(t: f64) -> Result<Self> {
        Ok(TestFunction::Sampled(Arc::new(sample_yor(t, YOR_SAMPLES)?)))
    }

    pub fn custom<F>(label: impl Into<String>, f: F, decay_rate: f64, origin_exponent: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TestFunction::Custom(CustomFunction { label: label.into(), f: Arc::new(f), decay_rate, origin_exponent })
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            TestFunction::Constant(c) => *c,
            TestFunction::Exponential { rate } => (-rate * r).exp(),
            TestFunction::PolyKernel { coeffs, .. } => {
                (-r).exp() * coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
            }
            TestFunction::Yor { t } => yor::direct_value(r, *t, &inner_yor_spec()).map_or(f64::NAN, |e| e.value),
            TestFunction::Sampled(s) => s.eval(r),
            TestFunction::Custom(c) => (c.f)(r),
        }
    }

    /// Exponential decay rate at infinity used for tail truncation.
    pub fn decay_rate(&self) -> f64 {
        match self {
            TestFunction::Constant(_) => 0.0,
            TestFunction::Exponential { rate } => *rate,
            TestFunction::PolyKernel { .. } | TestFunction::Yor { .. } => 1.0,
            TestFunction::Sampled(s) => match s.tail {
                TailModel::Zero => 1.0,
                TailModel::Exponential { rate } => rate,
            },
            TestFunction::Custom(c) => c.decay_rate,
        }
    }

    /// `p` with `|f(r)| <= C r^p` near the origin.
    pub fn origin_exponent(&self) -> f64 {
        match self {
            TestFunction::Custom(c) => c.origin_exponent,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::Sampled(s) => s.check_tail(),
            TestFunction::Yor { t } => yor::check_time(*t),
            TestFunction::Exponential { rate } if !rate.is_finite() => {
                Err(Error::InvalidSpec(format!("exponential rate must be finite, got {rate}")))
            }
            _ => Ok(()),
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn check_order(tau: f64) -> Result<()> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be non-negative, got {tau}")));
    }
    if tau > IMAG_ORDER_CAP {
        return Err(Error::FrequencyCap { omega: tau, cap: IMAG_ORDER_CAP });
    }
    Ok(())
}

/// `(Gf)(tau)` with the quadrature diagnostics.
pub fn kl_forward_eval(f: &TestFunction, tau: f64, spec: &QuadratureSpec) -> Result<EvalResult> {
    check_order(tau)?;
    f.validate()?;
    let p = f.origin_exponent();
    let rate = f.decay_rate().max(0.0);
    let negligible = 1e-3 * spec.abs_tol;
    let integrand = |r: f64| {
        let fv = f.eval(r);
        // |K_{i tau}| <= K_0 <= 4 k0_scale
        if (4.0 * fv * k0_scale(r)).abs() < negligible {
            return 0.0;
        }
        bessel_k_imag(tau, r).map_or(f64::NAN, |k| k * fv)
    };
    // |K_{i tau}(r)| <= K_0(r): logarithmic at 0, e^{-r} at infinity
    let damping = move |s: f64| {
        if s < 0.0 {
            -(1.0 + p) * s - (2.0 - s).ln()
        } else {
            (1.0 + rate) * s.exp() - s
        }
    };
    quadrature::integrate_positive_axis(integrand, 1.0, damping, spec)
}

/// `(Gf)(tau) = int_0^inf K_{i tau}(r) f(r) dr`.
pub fn kl_forward(f: &TestFunction, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(kl_forward_eval(f, tau, spec)?.value)
}

/// `int_0^inf e^{-p r} f(r) dr`, in closed form for the elementary variants.
pub fn laplace_transform(f: &TestFunction, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_positive("Laplace variable", p)?;
    match f {
        TestFunction::Constant(c) => Ok(c / p),
        TestFunction::Exponential { rate } => Ok(1.0 / (p + rate)),
        TestFunction::PolyKernel { coeffs, .. } => {
            // sum_k c_k k! / (p + 1)^{k+1}
            let q = 1.0 / (p + 1.0);
            let mut weight = q;
            let mut sum = 0.0;
            for (k, c) in coeffs.iter().enumerate() {
                if k > 0 {
                    weight *= k as f64 * q;
                }
                sum += c * weight;
            }
            Ok(sum)
        }
        _ => {
            let rate = f.decay_rate().max(0.0);
            let exponent = f.origin_exponent();
            let integrand = |r: f64| (-p * r).exp() * f.eval(r);
            let res = if exponent >= 0.0 {
                quadrature::integrate_semi_infinite(integrand, 0.0, |r: f64| (p + rate) * r, spec)?
            } else {
                let center = 1.0 / (p + rate);
                let damping = move |s: f64| {
                    if s < 0.0 {
                        -(1.0 + exponent) * s
                    } else {
                        s.exp() - s
                    }
                };
                quadrature::integrate_positive_axis(integrand, center, damping, spec)?
            };
            Ok(res.value)
        }
    }
}

/// `(Gf)(tau)` with the order of integration exchanged:
/// `int_0^inf cos(tau u) (Lf)(cosh u) du`, `Lf` the Laplace transform.
///
/// One oscillatory integral instead of a Bessel kernel at every node, so it
/// is far cheaper than [`kl_forward_eval`] when `Lf` has a closed form.
pub fn kl_forward_laplace(f: &TestFunction, tau: f64, spec: &QuadratureSpec) -> Result<EvalResult> {
    check_order(tau)?;
    f.validate()?;
    let p = f.origin_exponent();
    let inner = spec.with_rel_tol(1e-15).with_abs_tol(f64::MIN_POSITIVE);
    let envelope = |u: f64| laplace_transform(f, u.cosh(), &inner).unwrap_or(f64::NAN);
    // (Lf)(cosh u) = O((cosh u)^{-(1+p)})
    let damping = move |u: f64| (1.0 + p) * u.cosh().ln();
    quadrature::integrate_damped_oscillatory_capped(envelope, tau, Oscillation::Cos, damping, spec, IMAG_ORDER_CAP)
}

/// Declared decay of a spectral function `g(tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralDecay {
    /// `|g| <= C e^{-t tau^2 / 2}`.
    Gaussian { t: f64 },
    /// `|g| <= C tau^power e^{-rate tau}`.
    Exponential { rate: f64, power: f64 },
}

/// A function of the spectral variable, ready for [`kl_inverse`].
#[derive(Clone)]
pub struct SpectralFunction {
    pub g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub decay: SpectralDecay,
    /// Absolute accuracy of `g`; zero for closed forms. The inversion stops
    /// where the declared envelope of `g` falls below it.
    pub noise_floor: f64,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("decay", &self.decay)
            .field("noise_floor", &self.noise_floor)
            .finish()
    }
}

impl SpectralFunction {
    pub fn new<G>(g: G, decay: SpectralDecay) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { g: Arc::new(g), decay, noise_floor: 0.0 }
    }

    pub fn with_noise_floor(mut self, noise_floor: f64) -> Self {
        self.noise_floor = noise_floor;
        self
    }

    /// `e^{-t tau^2 / 2}`, the image of `F_t`.
    pub fn gaussian(t: f64) -> Self {
        Self::new(move |tau| (-0.5 * t * tau * tau).exp(), SpectralDecay::Gaussian { t })
    }

    /// `(-1)^n pi tau^{2n-1} / sinh(pi tau)`, the image of `e^{-r} p_n(r) / r`.
    pub fn poly_image(n: usize) -> Self {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let power = (2 * n - 1) as i32;
        Self::new(
            move |tau| {
                if tau == 0.0 {
                    return if n == 0 { sign } else { 0.0 };
                }
                // pi tau^k / sinh(pi tau) without overflow
                let e = (-2.0 * PI * tau).exp();
                sign * 2.0 * PI * tau.powi(power) * (-PI * tau).exp() / (1.0 - e)
            },
            SpectralDecay::Exponential { rate: PI, power: power as f64 },
        )
    }

    /// `-ln` of the declared envelope at `tau`.
    fn log_envelope(&self, tau: f64) -> f64 {
        match self.decay {
            SpectralDecay::Gaussian { t } => 0.5 * t * tau * tau,
            SpectralDecay::Exponential { rate, power } => rate * tau - power * tau.max(1.0).ln(),
        }
    }
}

/// `tau sinh(pi tau)`.
fn sinh_weight(tau: f64) -> f64 {
    0.5 * tau * ((PI * tau).exp() - (-PI * tau).exp())
}

/// `f(r) = 2/(r pi^2) int_0^inf tau sinh(pi tau) K_{i tau}(r) g(tau) dtau`.
pub fn kl_inverse(g: &SpectralFunction, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_positive("r", r)?;
    match g.decay {
        SpectralDecay::Gaussian { t } => check_positive("Gaussian decay parameter", t)?,
        SpectralDecay::Exponential { rate, .. } => {
            if !(rate >= PI) {
                return Err(Error::Divergence(format!(
                    "spectral function must decay at least like e^(-pi tau); declared rate {rate}"
                )));
            }
        }
    }
    // sinh(pi tau) |K_{i tau}(r)| grows at most like e^{pi tau / 2}
    let damping = |tau: f64| g.log_envelope(tau) - 0.5 * PI * tau - tau.max(1.0).ln();
    let mut cut = quadrature::truncation_point(damping, 0.0, 0.25, spec.truncation_exponent())?;
    if g.noise_floor > 0.0 {
        let target = -g.noise_floor.ln();
        let noise_cut = quadrature::truncation_point(|tau| g.log_envelope(tau), 0.0, 0.25, target)?;
        cut = cut.min(noise_cut);
    }
    let cut = cut.min(IMAG_ORDER_CAP);
    let scale = 2.0 / (r * PI * PI);
    let raw_spec = spec.with_abs_tol(spec.abs_tol / scale);
    let f = |tau: f64| {
        let gv = (g.g)(tau);
        if gv == 0.0 {
            return 0.0;
        }
        match bessel_k_imag(tau, r) {
            Ok(k) => sinh_weight(tau) * k * gv,
            Err(_) => f64::NAN,
        }
    };
    let breaks = yor::spectral_breaks(cut);
    // noise from K_{i tau}(r) times the envelope of g, and from g itself
    let level = (g.g)(0.0).abs().max((g.g)(1.0).abs() * g.log_envelope(1.0).exp());
    let k_noise = k_imag_noise(r);
    let noise = |tau: f64| {
        let k_bound = k0_scale(r).min(2.0 * (2.0 * PI / tau.max(1e-3)).sqrt() * (-0.5 * PI * tau).exp());
        sinh_weight(tau) * (level * (-g.log_envelope(tau)).exp() * k_noise + g.noise_floor * k_bound)
    };
    let floor = yor::NOISE_MARGIN * yor::weight_mass(noise, &breaks)?;
    let raw_spec = raw_spec.with_abs_tol(raw_spec.abs_tol.max(floor));
    Ok(quadrature::integrate_panels(&f, &breaks, &raw_spec)?.value * scale)
}

/// Settings for transforms that feed a second, outer quadrature.
fn accurate_forward_spec() -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(FORWARD_NOISE).with_truncation(FORWARD_DECADES)
}

/// Absolute error assumed for transform values from [`accurate_forward_spec`],
/// relative to the size of the transform.
const FORWARD_NOISE: f64 = 1e-15;

/// Tail cut for nested forward transforms, just past [`FORWARD_NOISE`].
const FORWARD_DECADES: f64 = 16.0;

/// Relative accuracy of a cubic-spline tabulation of `F_t`, and hence of its
/// transform.
const SAMPLED_FORWARD_NOISE: f64 = 1e-10;

fn has_closed_laplace(f: &TestFunction) -> bool {
    matches!(f, TestFunction::Constant(_) | TestFunction::Exponential { .. } | TestFunction::PolyKernel { .. })
}

/// `(Gf)(tau)` for use inside another quadrature, with its assumed relative
/// noise: the Laplace route where `Lf` is closed-form, the kernel route at
/// interpolation accuracy for tabulated functions.
fn nested_forward(f: &TestFunction) -> (impl Fn(f64) -> Result<f64> + '_, f64) {
    let sampled = matches!(f, TestFunction::Sampled(_));
    let noise = if sampled { SAMPLED_FORWARD_NOISE } else { FORWARD_NOISE };
    let spec = if sampled {
        nested_spec(&QuadratureSpec::default())
    } else {
        accurate_forward_spec()
    };
    let closed = has_closed_laplace(f);
    let eval = move |tau: f64| {
        if closed {
            Ok(kl_forward_laplace(f, tau, &spec)?.value)
        } else {
            kl_forward(f, tau, &spec)
        }
    };
    (eval, noise)
}

/// `kl_inverse(kl_forward(f))(r)` against `f(r)`, relative tolerance `1e-6`.
///
/// `decay` is the declared decay of `Gf`; the forward values are treated as
/// carrying an absolute error of `1e-15`.
pub fn roundtrip_check(f: &TestFunction, decay: SpectralDecay, r: f64) -> Result<CrossCheckReport> {
    f.validate()?;
    let inner = f.clone();
    let noise = nested_forward(f).1;
    let forward = move |tau: f64| nested_forward(&inner).0(tau).unwrap_or(f64::NAN);
    let g = SpectralFunction { g: Arc::new(forward), decay, noise_floor: noise };
    let spec = QuadratureSpec::default().with_rel_tol(1e-9).with_abs_tol(1e-14);
    let lhs = kl_inverse(&g, r, &spec)?;
    Ok(CrossCheckReport::relative(format!("KL roundtrip at r={r}"), lhs, f.eval(r), 1e-6))
}

/// `int_0^inf |f(r)|^2 r dr`.
pub fn weighted_square_norm(f: &TestFunction, spec: &QuadratureSpec) -> Result<f64> {
    f.validate()?;
    let p = f.origin_exponent();
    let rate = f.decay_rate().max(0.0);
    if !(2.0 * p + 2.0 > 0.0) {
        return Err(Error::Divergence("|f|^2 r is not integrable at the origin".into()));
    }
    if rate == 0.0 {
        return Err(Error::Divergence("|f|^2 r needs a decaying f".into()));
    }
    let integrand = |r: f64| {
        let v = f.eval(r);
        v * v * r
    };
    let damping = move |s: f64| if s < 0.0 { -(2.0 + 2.0 * p) * s } else { 2.0 * rate * s.exp() - 2.0 * s };
    Ok(quadrature::integrate_positive_axis(integrand, 1.0, damping, spec)?.value)
}

/// Probe step and ceiling for the spectral range of [`parseval_check`].
const PARSEVAL_PROBE_STEP: f64 = 0.5;
const PARSEVAL_TAU_CEILING: f64 = 60.0;

/// `int tau sinh(pi tau) |Gf(tau)|^2 dtau` against `(pi^2/2) int |f|^2 r dr`,
/// relative tolerance `1e-5`.
///
/// The spectral range ends once `|Gf|` has fallen to `1e-13` of its value at
/// the origin, past which the computed transform is rounding noise that the
/// `sinh` weight would amplify.
pub fn parseval_check(f: &TestFunction, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    let (forward, forward_noise) = nested_forward(f);
    let mut probes = vec![(0.0, forward(0.0)?.abs())];
    let mut peak = probes[0].1;
    let mut cut = 0.0;
    loop {
        cut += PARSEVAL_PROBE_STEP;
        let g = forward(cut)?.abs();
        probes.push((cut, g));
        peak = peak.max(g);
        if (g <= (10.0 * forward_noise).max(1e-13) * peak && cut >= 2.0) || cut >= PARSEVAL_TAU_CEILING {
            break;
        }
    }
    let integrand = |tau: f64| forward(tau).map_or(f64::NAN, |g| sinh_weight(tau) * g * g);
    // each transform value carries an absolute error of about forward_noise * peak
    let noise: f64 =
        probes.iter().map(|&(tau, g)| 2.0 * sinh_weight(tau) * g * forward_noise * peak * PARSEVAL_PROBE_STEP).sum();
    let outer = spec.with_rel_tol(spec.rel_tol.max(1e-8));
    let outer_tau = outer.with_abs_tol(outer.abs_tol.max(yor::NOISE_MARGIN * noise));
    // the integrand is smooth on the scale of the Gaussian-type decay of Gf
    let count = (0.5 * cut).ceil().max(2.0) as usize;
    let breaks: Vec<f64> = (0..=count).map(|i| cut * i as f64 / count as f64).collect();
    let lhs = quadrature::integrate_panels(&integrand, &breaks, &outer_tau)?.value;
    let rhs = 0.5 * PI * PI * weighted_square_norm(f, &outer)?;
    Ok(CrossCheckReport::relative("Parseval identity", lhs, rhs, 1e-5))
}

/// `int_0^inf exp(-(r (x^2+y^2)/(xy) + xy/r) / 2) g(r) dr`.
///
/// With `c = sqrt(x^2+y^2)` and `r = (xy/c) e^s` the exponent is
/// `-c cosh s`; `e^{-c}` is taken out so the remaining factor never exceeds 1.
/// `g(r) = O(r^p)` at the origin and grows at most linearly at infinity.
fn kernel_translate<G: Fn(f64) -> f64>(x: f64, y: f64, g: G, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    let c = x.hypot(y);
    let r0 = x * y / c;
    let integrand = |r: f64| {
        let q = 0.5 * (r / r0 + r0 / r) - 1.0;
        (-c * q).exp() * g(r)
    };
    let damping = move |s: f64| c * (s.cosh() - 1.0) - if s < 0.0 { (1.0 + p) * s } else { s };
    Ok((-c).exp() * quadrature::integrate_positive_axis(integrand, r0, damping, spec)?.value)
}

/// Geometric tolerance split for an inner quadrature.
fn inner_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.with_rel_tol(spec.rel_tol / 10.0).with_abs_tol(spec.abs_tol / 10.0)
}

fn check_ring(f: &TestFunction, name: &str) -> Result<()> {
    f.validate()?;
    if !(f.origin_exponent() > -1.0) || !(f.decay_rate() >= 0.0) {
        return Err(Error::RingMembership(format!(
            "{name} has an infinite K_0-weighted norm (origin exponent {}, decay rate {})",
            f.origin_exponent(),
            f.decay_rate()
        )));
    }
    Ok(())
}

/// `(f * h)(x) = 1/(2x) int int exp(-(x(u^2+y^2)/(uy) + yu/x) / 2) f(u) h(y) du dy`.
pub fn kl_convolution(f: &TestFunction, h: &TestFunction, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_positive("x", x)?;
    check_ring(f, "f")?;
    check_ring(h, "h")?;
    let inner = inner_spec(spec);
    let ph = h.origin_exponent();
    let pf = f.origin_exponent();
    let rate = f.decay_rate().max(0.0);
    let outer = |u: f64| {
        let fu = f.eval(u);
        if fu == 0.0 {
            return 0.0;
        }
        match kernel_translate(x, u, |y| h.eval(y), ph, &inner) {
            Ok(j) => fu * j,
            Err(_) => f64::NAN,
        }
    };
    // inner factor behaves like u near 0 and like e^{-u} at infinity
    let damping = move |s: f64| if s < 0.0 { -(2.0 + pf) * s } else { (1.0 + rate) * x * s.exp() - 2.0 * s };
    Ok(quadrature::integrate_positive_axis(outer, x, damping, spec)?.value / (2.0 * x))
}

/// `G[f * h](tau)` against `(Gf)(tau) (Gh)(tau)`, relative tolerance `1e-4`.
pub fn factorization_check(f: &TestFunction, h: &TestFunction, tau: f64, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    check_ring(f, "f")?;
    check_ring(h, "h")?;
    let product = TestFunction::Sampled(Arc::new(sample_convolution(f, h)?));
    let lhs = kl_forward(&product, tau, &nested_spec(spec))?;
    let rhs = nested_forward(f).0(tau)? * nested_forward(h).0(tau)?;
    Ok(CrossCheckReport::relative(format!("factorization at tau={tau}"), lhs, rhs, 1e-4))
}

/// Points in the tabulation of a convolution for [`factorization_check`].
const CONVOLUTION_SAMPLES: usize = 240;
const CONVOLUTION_SAMPLE_MIN: f64 = 1e-6;
const CONVOLUTION_SAMPLE_MAX: f64 = 40.0;

/// `f * h` on a cubic spline, with the tail fitted to the last two samples.
fn sample_convolution(f: &TestFunction, h: &TestFunction) -> Result<SampledFunction> {
    let spec = QuadratureSpec::default().with_rel_tol(1e-9).with_abs_tol(1e-16);
    let grid = yor_grid(CONVOLUTION_SAMPLE_MIN, CONVOLUTION_SAMPLE_MAX, CONVOLUTION_SAMPLES);
    let values = grid.iter().map(|&x| kl_convolution(f, h, x, &spec)).collect::<Result<Vec<_>>>()?;
    let n = values.len();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (v0, v1) = (values[n - 2], values[n - 1]);
    let tail = if v1.abs() <= 1e-12 * peak {
        TailModel::Zero
    } else {
        TailModel::Exponential { rate: (v0 / v1).ln() / (grid[n - 1] - grid[n - 2]) }
    };
    SampledFunction::new(grid, values, Interpolation::Cubic, tail)
}

/// Forward settings for a tabulated integrand.
fn nested_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.with_rel_tol(spec.rel_tol.max(1e-9)).with_abs_tol(spec.abs_tol.max(0.1 * SAMPLED_FORWARD_NOISE)).with_truncation(13.0)
}

/// `K_{i tau}(x) K_{i tau}(y)` against
/// `1/2 int exp(-(t(x^2+y^2)/(xy) + xy/t) / 2) K_{i tau}(t) dt / t`,
/// tolerance `1e-8`.
pub fn macdonald_check(tau: f64, x: f64, y: f64, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    check_order(tau)?;
    check_positive("x", x)?;
    check_positive("y", y)?;
    let lhs = bessel_k_imag(tau, x)? * bessel_k_imag(tau, y)?;
    let g = |t: f64| bessel_k_imag(tau, t).map_or(f64::NAN, |k| k / t);
    // K_{i tau}(t) / t ~ ln(t) / t near the origin
    let rhs = 0.5 * kernel_translate(x, y, g, -1.0 + 1e-3, &inner_spec(spec))?;
    Ok(CrossCheckReport::new(format!("Macdonald formula tau={tau} x={x} y={y}"), lhs, rhs, 1e-8))
}

/// `h_t(x, y)` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatKernelPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

/// Which representation of the heat kernel to use.
#[derive(Debug, Clone)]
pub enum HeatKernelForm {
    /// `2/(x pi^2) int e^{-t tau^2/2} tau sinh(pi tau) K_{i tau}(x) K_{i tau}(y) dtau`.
    Spectral,
    /// `1/x int exp(-(r(x^2+y^2)/(xy) + xy/r) / 2) F_t(r) dr` with the
    /// given source for `F_t`.
    Translation { t: f64, source: TestFunction },
}

impl HeatKernelForm {
    /// Translation form over a tabulated `F_t`.
    pub fn translation_sampled(t: f64) -> Result<Self> {
        Ok(HeatKernelForm::Translation { t, source: TestFunction::yor_sampled(t)? })
    }
}

fn spectral_heat(t: f64, x: f64, y: f64, kx: &dyn Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
    let scale = 2.0 / (x * PI * PI);
    let raw = spec.with_abs_tol(spec.abs_tol / scale);
    let cut = yor::spectral_cutoff(t, spec.truncation_log_decades);
    if cut > IMAG_ORDER_CAP {
        return Err(Error::Window(format!("spectral cut-off {cut:.2} exceeds {IMAG_ORDER_CAP}")));
    }
    let f = |tau: f64| match bessel_k_imag(tau, y) {
        Ok(k) => yor::spectral_weight(tau, t, 1) * kx(tau) * k,
        Err(_) => f64::NAN,
    };
    let breaks = yor::spectral_breaks(cut);
    let noise = k_imag_noise(x) * k0_scale(y) + k0_scale(x) * k_imag_noise(y);
    let floor = yor::NOISE_MARGIN * yor::weight_mass(|tau| yor::spectral_weight(tau, t, 1), &breaks)? * noise;
    let raw = raw.with_abs_tol(raw.abs_tol.max(floor));
    Ok(quadrature::integrate_panels(&f, &breaks, &raw)?.value * scale)
}

/// `K_{i tau}(x)` for a fixed `x`, memoised by the bits of `tau`.
pub(crate) struct CachedK {
    x: f64,
    cache: RefCell<HashMap<u64, f64>>,
}

impl CachedK {
    pub(crate) fn new(x: f64) -> Self {
        Self { x, cache: RefCell::new(HashMap::new()) }
    }

    pub(crate) fn get(&self, tau: f64) -> f64 {
        if let Some(v) = self.cache.borrow().get(&tau.to_bits()) {
            return *v;
        }
        let v = bessel_k_imag(tau, self.x).unwrap_or(f64::NAN);
        self.cache.borrow_mut().insert(tau.to_bits(), v);
        v
    }
}

/// `h_t(x, y)` in the requested form, without window checks.
pub fn heat_kernel_value(t: f64, x: f64, y: f64, form: &HeatKernelForm, spec: &QuadratureSpec) -> Result<f64> {
    match form {
        HeatKernelForm::Spectral => {
            let kx = |tau: f64| bessel_k_imag(tau, x).unwrap_or(f64::NAN);
            spectral_heat(t, x, y, &kx, spec)
        }
        HeatKernelForm::Translation { t: ts, source } => {
            if *ts != t {
                return Err(Error::Domain(format!("translation source is F_{ts}, requested t = {t}")));
            }
            Ok(kernel_translate(x, y, |r| source.eval(r), 0.0, spec)? / x)
        }
    }
}

/// `h_t(x, y)` from the spectral form.
pub fn heat_kernel(t: f64, x: f64, y: f64, spec: &QuadratureSpec) -> Result<HeatKernelPoint> {
    yor::check_time(t)?;
    check_positive("x", x)?;
    check_positive("y", y)?;
    let value = heat_kernel_value(t, x, y, &HeatKernelForm::Spectral, spec)?;
    Ok(HeatKernelPoint { t, x, y, value })
}

/// `h_t(x, y)` from the translation form with `F_t` by the direct route.
pub fn heat_kernel_translation(t: f64, x: f64, y: f64, spec: &QuadratureSpec) -> Result<HeatKernelPoint> {
    yor::check_time(t)?;
    check_positive("x", x)?;
    check_positive("y", y)?;
    let form = HeatKernelForm::Translation { t, source: TestFunction::Yor { t } };
    let value = heat_kernel_value(t, x, y, &form, spec)?;
    Ok(HeatKernelPoint { t, x, y, value })
}

/// Spectral truncation used for the heat kernel inside [`semigroup_check`].
const SEMIGROUP_DECADES: f64 = 20.0;

/// `int_0^inf h_{t1}(r, y) F_{t2}(y) dy` against `F_{t1+t2}(r)`, relative
/// tolerance `1e-4`. The heat kernel is the spectral form.
pub fn semigroup_check(t1: f64, t2: f64, r: f64, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    yor::check_time(t1)?;
    yor::check_time(t2)?;
    yor::check_time(t1 + t2)?;
    check_positive("r", r)?;
    let kr = CachedK::new(r);
    let kx = |tau: f64| kr.get(tau);
    let heat_spec = QuadratureSpec::default()
        .with_rel_tol(1e-8)
        .with_abs_tol(1e-14)
        .with_truncation(SEMIGROUP_DECADES);
    let fy = inner_yor_spec();
    let integrand = |y: f64| {
        let f = match yor::direct_value(y, t2, &fy) {
            Ok(v) => v.value,
            Err(_) => return f64::NAN,
        };
        spectral_heat(t1, r, y, &kx, &heat_spec).map_or(f64::NAN, |h| h * f)
    };
    // h_{t1}(r, y) and F_{t2}(y) both vanish linearly at the origin
    let damping = |s: f64| if s < 0.0 { -3.0 * s } else { 2.0 * r * s.exp() - 2.0 * s };
    let outer = spec.with_rel_tol(spec.rel_tol.max(1e-7)).with_truncation(12.0);
    let lhs = quadrature::integrate_positive_axis(integrand, r, damping, &outer)?.value;
    let rhs = yor::spectral_value(r, t1 + t2, &QuadratureSpec::default())?.value;
    Ok(CrossCheckReport::relative(format!("semigroup t1={t1} t2={t2} r={r}"), lhs, rhs, 1e-4))
}

/// `(F_{t1} * F_{t2})(r)` against `F_{t1+t2}(r) / 2`, relative tolerance `1e-4`.
pub fn index_law_check(t1: f64, t2: f64, r: f64, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    yor::check_time(t1 + t2)?;
    let f1 = TestFunction::yor_sampled(t1)?;
    let f2 = if t2 == t1 { f1.clone() } else { TestFunction::yor_sampled(t2)? };
    let lhs = kl_convolution(&f1, &f2, r, spec)?;
    let rhs = 0.5 * yor::spectral_value(r, t1 + t2, &QuadratureSpec::default())?.value;
    Ok(CrossCheckReport::relative(format!("index law t1={t1} t2={t2} r={r}"), lhs, rhs, 1e-4))
}

/// Value of the `K_alpha`-weighted `L_1` norm, or divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum NormValue {
    Finite(f64),
    Divergent,
}

impl NormValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, NormValue::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            NormValue::Finite(v) => Some(*v),
            NormValue::Divergent => None,
        }
    }
}

/// `int_0^inf |f(x)| K_alpha(x) dx`. Depends on `|alpha|` only.
pub fn l_alpha_norm(f: &TestFunction, alpha: f64, spec: &QuadratureSpec) -> Result<NormValue> {
    f.validate()?;
    let nu = alpha.abs();
    if !nu.is_finite() || nu > REAL_ORDER_CAP {
        return Err(Error::OrderTooLarge { order: nu, cap: REAL_ORDER_CAP });
    }
    let p = f.origin_exponent();
    let rate = f.decay_rate();
    // K_nu(x) ~ x^{-nu} (or ln x for nu = 0) near the origin
    if p - nu <= -1.0 || !(rate > -1.0) {
        return Ok(NormValue::Divergent);
    }
    let integrand = |x: f64| bessel_k_real(nu, x).map_or(f64::NAN, |k| k * f.eval(x).abs());
    let damping = move |s: f64| {
        if s < 0.0 {
            -(1.0 + p - nu) * s - (2.0 - s).ln()
        } else {
            (1.0 + rate) * s.exp() - (1.0 + nu) * s
        }
    };
    Ok(NormValue::Finite(quadrature::integrate_positive_axis(integrand, 1.0, damping, spec)?.value))
}
