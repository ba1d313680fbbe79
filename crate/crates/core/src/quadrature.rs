//! Adaptive integration on finite, semi-infinite and damped-oscillatory
//! ranges.
//!
//! Every routine bottoms out in one engine: globally adaptive bisection with a
//! 10-point Gauss-Legendre rule. Each panel carries the rule applied to the
//! whole panel and to its two halves; the panel error is the difference of the
//! two levels. The panel with the largest error is split until the summed error
//! meets `max(rel_tol * |value|, abs_tol)` or the refinement budget runs out.
//!
//! Infinite ranges are truncated from a caller-supplied damping bound: the
//! integrand is cut where the bound has grown `truncation_log_decades * ln 10`
//! above the smallest value seen while scanning outward.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 10-point Gauss-Legendre abscissae on [-1, 1] (positive half).
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_19,
    0.679_409_568_299_024_41,
    0.865_063_366_688_984_51,
    0.973_906_528_517_171_72,
];

const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_36,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_59,
    0.066_671_344_308_688_14,
];

/// Polynomials up to this degree are integrated exactly by one panel.
pub const EXACTNESS_DEGREE: usize = 19;

/// Default cap on the oscillation frequency handled by
/// [`integrate_damped_oscillatory`].
pub const FREQUENCY_CAP: f64 = 1.0e4;

/// Panels per oscillation half-period laid down before refinement starts.
pub const PANELS_PER_HALF_PERIOD: usize = 8;

/// Error level, in units of `EPSILON` times the integral of `|f|`, treated
/// as rounding noise.
const ROUNDOFF_FACTOR: f64 = 64.0;

/// Furthest abscissa the truncation search will try.
const TRUNCATION_CAP: f64 = 1.0e6;

/// Hard limit on the number of initial panels for one integral.
const MAX_INITIAL_PANELS: usize = 2_000_000;

/// Tolerances and limits for one integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of panel bisections.
    pub max_refinements: usize,
    /// Tail cut where the damping exponent exceeds this many decades.
    pub truncation_log_decades: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_refinements: 4000,
            truncation_log_decades: 40.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidSpec(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidSpec(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_refinements < 1 {
            return Err(Error::InvalidSpec("max_refinements must be at least 1".into()));
        }
        if !(self.truncation_log_decades > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "truncation_log_decades must be positive, got {}",
                self.truncation_log_decades
            )));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_truncation(mut self, decades: f64) -> Self {
        self.truncation_log_decades = decades;
        self
    }

    /// Damping exponent at which tails are cut, `D ln 10`.
    pub fn truncation_exponent(&self) -> f64 {
        self.truncation_log_decades * std::f64::consts::LN_10
    }

    /// Tolerance the summed error estimate must meet for `value`.
    pub fn tolerance_for(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

/// Value of one integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

impl EvalResult {
    fn zero() -> Self {
        Self { value: 0.0, error_estimate: 0.0, nodes_used: 0, converged: true }
    }

    /// Combine results of integrals over disjoint ranges.
    pub fn combine(self, other: EvalResult) -> EvalResult {
        EvalResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            nodes_used: self.nodes_used + other.nodes_used,
            converged: self.converged && other.converged,
        }
    }

    /// Multiply value and error by a constant factor.
    pub fn scaled(self, factor: f64) -> EvalResult {
        EvalResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            ..self
        }
    }
}

/// Trigonometric factor multiplying an oscillatory envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Oscillation {
    Cos,
    Sin,
}

struct RuleValue {
    value: f64,
    magnitude: f64,
}

fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<RuleValue> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut value = 0.0;
    let mut magnitude = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
        let dx = half * x;
        for abscissa in [mid - dx, mid + dx] {
            let y = f(abscissa);
            if !y.is_finite() {
                return Err(Error::NonFinite { abscissa });
            }
            value += w * y;
            magnitude += w * y.abs();
        }
    }
    Ok(RuleValue { value: value * half, magnitude: magnitude * half })
}

struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    magnitude: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, coarse: f64) -> Result<Panel> {
        let m = 0.5 * (a + b);
        let left = gauss_legendre(f, a, m)?;
        let right = gauss_legendre(f, m, b)?;
        let fine = left.value + right.value;
        Ok(Panel {
            a,
            b,
            left: left.value,
            right: right.value,
            magnitude: left.magnitude + right.magnitude,
            error: (fine - coarse).abs(),
        })
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }

    /// Splitting cannot help once the error sits at the rounding level of the
    /// panel or the panel is too narrow to bisect.
    fn exhausted(&self) -> bool {
        let m = 0.5 * (self.a + self.b);
        self.error <= ROUNDOFF_FACTOR * f64::EPSILON * self.magnitude || !(self.a < m && m < self.b)
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integration over consecutive panels given by `breaks`
/// (strictly increasing, at least two points).
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Result<EvalResult> {
    spec.validate()?;
    if breaks.len() < 2 {
        return Ok(EvalResult::zero());
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() + spec.max_refinements);
    let mut done: Vec<Panel> = Vec::new();
    let mut nodes = 0usize;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        let coarse = gauss_legendre(f, a, b)?.value;
        heap.push(Panel::new(f, a, b, coarse)?);
        nodes += 60;
    }

    let mut value: f64 = heap.iter().map(Panel::value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    let mut magnitude: f64 = heap.iter().map(|p| p.magnitude).sum();
    let mut refinements = 0usize;

    // Past the rounding floor of the whole sum further splitting only reshuffles noise.
    while error > spec.tolerance_for(value)
        && error > ROUNDOFF_FACTOR * f64::EPSILON * magnitude
        && refinements < spec.max_refinements
    {
        let Some(worst) = heap.pop() else { break };
        if worst.exhausted() {
            done.push(worst);
            continue;
        }
        let m = 0.5 * (worst.a + worst.b);
        let lower = Panel::new(f, worst.a, m, worst.left)?;
        let upper = Panel::new(f, m, worst.b, worst.right)?;
        nodes += 40;
        refinements += 1;
        value += lower.value() + upper.value() - worst.value();
        error += lower.error + upper.error - worst.error;
        magnitude += lower.magnitude + upper.magnitude - worst.magnitude;
        heap.push(lower);
        heap.push(upper);
        // Resum now and then so the running totals do not drift.
        if refinements % 256 == 0 {
            value = heap.iter().chain(done.iter()).map(Panel::value).sum();
            error = heap.iter().chain(done.iter()).map(|p| p.error).sum();
            magnitude = heap.iter().chain(done.iter()).map(|p| p.magnitude).sum();
        }
    }

    let value: f64 = heap.iter().chain(done.iter()).map(Panel::value).sum();
    let error: f64 = heap.iter().chain(done.iter()).map(|p| p.error).sum();
    Ok(EvalResult {
        value,
        error_estimate: error,
        nodes_used: nodes,
        converged: error <= spec.tolerance_for(value),
    })
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<EvalResult> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    integrate_panels(&f, &[a, b], spec)
}

/// Find where `damping` (a lower bound on `-ln |f|`) has risen `threshold`
/// above the smallest value seen while scanning outward from `start`.
///
/// The scan doubles its step from `step`; the crossing is then refined by
/// bisection, assuming the bound is monotone past its minimum.
pub fn truncation_point<D: Fn(f64) -> f64>(damping: D, start: f64, step: f64, threshold: f64) -> Result<f64> {
    let mut min_seen = damping(start);
    let mut prev = start;
    let mut h = step;
    loop {
        let x = start + h;
        if h > TRUNCATION_CAP {
            return Err(Error::UnboundedTail { cap: start + TRUNCATION_CAP });
        }
        let d = damping(x);
        if d.is_nan() {
            return Err(Error::NonFinite { abscissa: x });
        }
        if d >= min_seen + threshold {
            let (mut lo, mut hi) = (prev, x);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if damping(mid) >= min_seen + threshold {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        min_seen = min_seen.min(d);
        prev = x;
        h *= 2.0;
    }
}

fn uniform_breaks(a: f64, b: f64, count: usize) -> Vec<f64> {
    let count = count.max(1);
    let h = (b - a) / count as f64;
    let mut v: Vec<f64> = (0..count).map(|i| a + h * i as f64).collect();
    v.push(b);
    v
}

/// Integrate `f` over `[a, inf)`.
///
/// `damping(x)` must bound `-ln |f(x)|` from below and be monotone once it
/// starts to grow; the tail is cut where it has risen
/// `spec.truncation_log_decades` decades above its minimum.
pub fn integrate_semi_infinite<F, D>(f: F, a: f64, damping: D, spec: &QuadratureSpec) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    spec.validate()?;
    let cut = truncation_point(&damping, a, 0.125, spec.truncation_exponent())?;
    integrate_panels(&f, &uniform_breaks(a, cut, 8), spec)
}

/// Integrate `envelope(x) * cos(omega x)` (or `sin`) over `[0, inf)`.
///
/// Each half-period is split into [`PANELS_PER_HALF_PERIOD`] panels before
/// adaptive refinement, so the sign structure is resolved before any error
/// estimate is trusted.
pub fn integrate_damped_oscillatory<F, D>(
    envelope: F,
    omega: f64,
    kind: Oscillation,
    damping: D,
    spec: &QuadratureSpec,
) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    integrate_damped_oscillatory_capped(envelope, omega, kind, damping, spec, FREQUENCY_CAP)
}

/// As [`integrate_damped_oscillatory`] with an explicit frequency cap.
pub fn integrate_damped_oscillatory_capped<F, D>(
    envelope: F,
    omega: f64,
    kind: Oscillation,
    damping: D,
    spec: &QuadratureSpec,
    cap: f64,
) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be a finite non-negative number, got {omega}")));
    }
    if omega > cap {
        return Err(Error::FrequencyCap { omega, cap });
    }
    if omega == 0.0 {
        return match kind {
            Oscillation::Cos => integrate_semi_infinite(envelope, 0.0, damping, spec),
            Oscillation::Sin => Ok(EvalResult::zero()),
        };
    }
    let cut = truncation_point(&damping, 0.0, 0.125, spec.truncation_exponent())?;
    let width = std::f64::consts::PI / omega / PANELS_PER_HALF_PERIOD as f64;
    let count = (cut / width).ceil() as usize;
    if count > MAX_INITIAL_PANELS {
        return Err(Error::FrequencyCap { omega, cap: omega * MAX_INITIAL_PANELS as f64 / count as f64 });
    }
    let breaks: Vec<f64> = (0..=count).map(|i| i as f64 * width).collect();
    let f = |x: f64| {
        let phase = match kind {
            Oscillation::Cos => (omega * x).cos(),
            Oscillation::Sin => (omega * x).sin(),
        };
        envelope(x) * phase
    };
    integrate_panels(&f, &breaks, spec)
}

/// Integrate `f` over `(0, inf)` in the logarithmic variable
/// `s = ln(r / center)`.
///
/// `damping(s)` bounds `-ln |f(r) r|` from below at `r = center * e^s` and
/// must grow in both directions away from its minimum. Each end is cut where
/// it has risen `spec.truncation_log_decades` decades above the smallest value
/// seen on that side.
pub fn integrate_positive_axis<F, D>(f: F, center: f64, damping: D, spec: &QuadratureSpec) -> Result<EvalResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(center > 0.0) || !center.is_finite() {
        return Err(Error::Domain(format!("center must be positive, got {center}")));
    }
    let threshold = spec.truncation_exponent();
    let upper = truncation_point(&damping, 0.0, 0.25, threshold)?;
    let lower = -truncation_point(|s| damping(-s), 0.0, 0.25, threshold)?;
    let count = ((upper - lower) / 0.5).ceil() as usize;
    let g = |s: f64| {
        let r = center * s.exp();
        if r == 0.0 || !r.is_finite() {
            0.0
        } else {
            f(r) * r
        }
    };
    integrate_panels(&g, &uniform_breaks(lower, upper, count.max(4)), spec)
}
