//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use yorkl::kl::{self, TestFunction};
use yorkl::polys::{self, BoundParams};
use yorkl::quadrature::QuadratureSpec;
use yorkl::report::CrossCheckReport;
use yorkl::{suites, yor, Result};

const CROSS_TOL: f64 = 1e-8;
const KL_IMAGE_TOL: f64 = 1e-6;
const NORM_TOL: f64 = 1e-5;
const MACDONALD_TOL: f64 = 1e-8;
const SEMIGROUP_TOL: f64 = 1e-4;
const SEMIGROUP_CONSISTENCY_TOL: f64 = 2e-4;
const INDEX_LAW_TOL: f64 = 1e-4;
const BERNOULLI_TOL: f64 = 1e-8;
const DIFFUSION_TOL: f64 = 1e-4;
const SERIES_TOL: f64 = 1e-6;
const EXPANSION_TOL: f64 = 1e-3;
const POLY_EQUIVALENCE_SECONDS: f64 = 10.0;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

/// Relative agreement at a pinned tolerance, regardless of the tolerance the
/// library attached to the report.
fn relative_ok(c: &CrossCheckReport, tol: f64) -> bool {
    c.rel_diff.is_finite() && c.rel_diff <= tol
}

/// Tracks the worst relative difference over a family of checks.
#[derive(Default)]
struct Worst {
    rel: f64,
    failures: Vec<String>,
    count: usize,
}

impl Worst {
    fn add(&mut self, c: &CrossCheckReport, ok: bool) {
        self.count += 1;
        if c.rel_diff.is_finite() {
            self.rel = self.rel.max(c.rel_diff);
        }
        if !ok {
            self.failures.push(c.context.clone());
        }
    }

    fn outcome(&self, what: &str) -> Outcome {
        let mut detail = format!("{} {what}, worst relative difference {:.2e}", self.count, self.rel);
        if !self.failures.is_empty() {
            detail.push_str(&format!("; failing: {}", self.failures.join(", ")));
        }
        Outcome::new(self.failures.is_empty(), detail)
    }
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 0..=30 {
        if polys::poly_explicit(n)? != polys::poly_recurrence(n) {
            bad.push(n);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome::new(
        bad.is_empty() && secs < POLY_EQUIVALENCE_SECONDS,
        format!("explicit == recurrence for n = 0..=30 in {secs:.2} s (limit {POLY_EQUIVALENCE_SECONDS} s); mismatches {bad:?}"),
    ))
}

fn criterion_2() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut count = 0;
    for n in 1..=20usize {
        for k in n + 1..=2 * n {
            count += 1;
            if !polys::scaled_triple_sum(k, n).is_zero() {
                bad.push((n, k));
            }
        }
        // the sum is scaled by 2^n
        let mut expected = (factorial(n) * polys::double_factorial_odd(n)) << n;
        if n % 2 == 1 {
            expected = -expected;
        }
        count += 1;
        if polys::scaled_triple_sum(n, n) != expected {
            bad.push((n, n));
        }
    }
    Ok(Outcome::new(bad.is_empty(), format!("{count} exact big-integer identities for n <= 20; violations {bad:?}")))
}

fn criterion_3() -> Result<Outcome> {
    let mut bad = Vec::new();
    for n in 1..=30 {
        let mut expected = polys::double_factorial_odd(n);
        if n % 2 == 1 {
            expected = -expected;
        }
        if polys::poly_recurrence(n).leading() != &expected {
            bad.push(n);
        }
    }
    Ok(Outcome::new(bad.is_empty(), format!("a_(n,n) = (-1)^n (2n-1)!! exactly for n = 1..=30; mismatches {bad:?}")))
}

fn criterion_4() -> Result<Outcome> {
    let spec = QuadratureSpec::default();
    let mut w = Worst::default();
    for &t in &[0.5, 1.0, 2.0, 5.0] {
        for &r in &[0.5, 1.0, 2.0, 5.0, 10.0] {
            let c = suites::cross_representation(r, t, CROSS_TOL, &spec)?;
            w.add(&c, relative_ok(&c, CROSS_TOL));
        }
    }
    Ok(w.outcome(&format!("direct vs spectral points at {CROSS_TOL:e}")))
}

fn criterion_5() -> Result<Outcome> {
    let spec = QuadratureSpec::default();
    let mut w = Worst::default();
    for &tau in &[0.5, 1.0, 2.0] {
        for &t in &[0.5, 1.0, 2.0] {
            let c = yor::yor_kl_image(tau, t, &spec)?;
            let expected = 0.5 * (-0.5 * t * tau * tau).exp();
            let c = CrossCheckReport::relative(c.context.clone(), c.lhs, expected, KL_IMAGE_TOL);
            w.add(&c, relative_ok(&c, KL_IMAGE_TOL));
        }
    }
    let mut o = w.outcome(&format!("(tau, t) points at {KL_IMAGE_TOL:e}"));
    o.detail.push_str("; corrected constant G[F_t] = e^(-t tau^2/2) / 2");
    Ok(o)
}

fn criterion_6() -> Result<Outcome> {
    let spec = QuadratureSpec::default();
    let mut w = Worst::default();
    for &t in &[0.5, 1.0, 2.0, 4.0] {
        let value = kl::weighted_square_norm(&TestFunction::Yor { t }, &spec)?;
        let expected = (PI * PI / (4.0 * t)).exp() / (8.0 * t * (PI * t).sqrt());
        let c = CrossCheckReport::relative(format!("norm t={t}"), value, expected, NORM_TOL);
        w.add(&c, relative_ok(&c, NORM_TOL));
    }
    let mut o = w.outcome(&format!("squared norms at {NORM_TOL:e}"));
    o.detail.push_str("; corrected constant e^(pi^2/4t) / (8 t sqrt(pi t))");
    Ok(o)
}

fn criterion_7() -> Result<Outcome> {
    let spec = QuadratureSpec::default();
    let mut w = Worst::default();
    for &tau in &[0.0, 0.5, 1.0] {
        for &(x, y) in &[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)] {
            let c = kl::macdonald_check(tau, x, y, &spec)?;
            let ok = c.abs_diff <= MACDONALD_TOL || relative_ok(&c, MACDONALD_TOL);
            w.add(&c, ok);
        }
    }
    Ok(w.outcome(&format!("orders {{0, i/2, i}} x pairs at {MACDONALD_TOL:e}")))
}

fn criterion_8() -> Result<Outcome> {
    let spec = QuadratureSpec::default();
    let mut w = Worst::default();
    let a = kl::semigroup_check(1.0, 1.0, 1.0, &spec)?;
    w.add(&a, relative_ok(&a, SEMIGROUP_TOL));
    let b = kl::semigroup_check(0.5, 1.5, 2.0, &spec)?;
    w.add(&b, relative_ok(&b, SEMIGROUP_TOL));
    let split = kl::semigroup_check(1.5, 0.5, 1.0, &spec)?;
    let c = CrossCheckReport::relative("semigroup (1,1) vs (1.5,0.5)", a.lhs, split.lhs, SEMIGROUP_CONSISTENCY_TOL);
    w.add(&c, relative_ok(&c, SEMIGROUP_CONSISTENCY_TOL));
    for &(t1, t2, r) in &[(1.0, 1.0, 1.0), (0.5, 1.5, 2.0)] {
        let c = kl::index_law_check(t1, t2, r, &spec)?;
        w.add(&c, relative_ok(&c, INDEX_LAW_TOL));
    }
    let mut o = w.outcome(&format!("semigroup and index-law checks at {SEMIGROUP_TOL:e}"));
    o.detail.push_str("; corrected constant F_t1 * F_t2 = F_(t1+t2) / 2");
    Ok(o)
}

fn criterion_9() -> Result<Outcome> {
    let mut w = Worst::default();
    for n in 1..=3 {
        let c = polys::verify_bernoulli_integral(n)?;
        w.add(&c, relative_ok(&c, BERNOULLI_TOL));
    }
    Ok(w.outcome(&format!("Bernoulli integrals at {BERNOULLI_TOL:e}")))
}

fn criterion_10() -> Result<Outcome> {
    let params = [BoundParams::new(1.0, 2.0)?, BoundParams::at_endpoint(0.5)?];
    let mut violations = Vec::new();
    let mut count = 0;
    let mut tightest = f64::INFINITY;
    for p in &params {
        for n in 1..=10 {
            for &x in &[0.1, 1.0, 3.0] {
                count += 1;
                let value = polys::poly_eval(&polys::poly_recurrence(n), x).abs();
                let bound = polys::poly_bound(n, x, p)?;
                tightest = tightest.min(bound / value);
                if !(value <= bound) {
                    violations.push((n, x, p.epsilon()));
                }
            }
        }
    }
    Ok(Outcome::new(
        violations.is_empty(),
        format!("{count} points, smallest bound/|p_n| {tightest:.3}; violations {violations:?}"),
    ))
}

fn criterion_11() -> Result<Outcome> {
    let mut residual_fail = Vec::new();
    let mut worst = 0.0f64;
    for &r in &[0.5, 1.0, 3.0] {
        for &t in &[0.5, 1.0, 2.0] {
            let c = yor::diffusion_residual(r, t)?;
            let f = yor::yor_spectral(r, t, &QuadratureSpec::default())?.value;
            let tol = DIFFUSION_TOL * f.abs().max(1.0);
            worst = worst.max(c.abs_diff / f.abs().max(1.0));
            if !(c.abs_diff <= tol) {
                residual_fail.push((r, t));
            }
        }
    }
    let mut bound_fail = Vec::new();
    let mut count = 0;
    for &r in &[0.5, 1.0, 2.0, 10.0] {
        for &t in &[0.5, 1.0, 2.0] {
            for m in 0..=2 {
                count += 1;
                let c = yor::derivative_bound_check(r, t, m)?;
                if !(c.lhs <= c.rhs) {
                    bound_fail.push((r, t, m));
                }
            }
        }
    }
    Ok(Outcome::new(
        residual_fail.is_empty() && bound_fail.is_empty(),
        format!(
            "diffusion residual for u = r F_t on 3x3 grid, worst {worst:.2e} (limit {DIFFUSION_TOL:e}); \
             derivative bound on {count} points; failures {residual_fail:?} {bound_fail:?}"
        ),
    ))
}

fn criterion_12() -> Result<Outcome> {
    let mut w = Worst::default();
    for n in 1..=6 {
        let p = polys::poly_recurrence(n);
        for &x in &[0.1, 1.0, 2.0, 5.0] {
            let m = polys::series_peak_index(n, x) + 60;
            let s = polys::poly_series_bessel(n, x, m)?;
            let c = CrossCheckReport::relative(format!("series n={n} x={x}"), s.value, polys::poly_eval(&p, x), SERIES_TOL);
            w.add(&c, relative_ok(&c, SERIES_TOL));
        }
    }
    for &(x, t, n, tol) in &[(0.0, 0.5, 12, 1e-10), (1.0, 0.5, 12, 1e-10), (2.0, 1.0, 20, 1e-8)] {
        let c = polys::generating_check(x, t, n, tol)?;
        let ok = c.passed && c.abs_diff <= tol;
        w.add(&c, ok);
    }
    Ok(w.outcome("series and generating-function checks"))
}

fn criterion_13() -> Result<Outcome> {
    let rows = suites::ratio_study()?;
    let complete = rows.len() == 3 * 25 && rows.iter().all(|r| r.ratio.is_finite());
    println!("    ratio study p_n(1) / main term:");
    println!("    {:>4} {:>6} {:>14} {:>12}", "n", "beta", "ratio", "step");
    for r in rows.iter().filter(|r| r.n % 4 == 1 || r.n == 25) {
        let step = r.step.map_or("-".to_string(), |s| format!("{s:.4}"));
        println!("    {:>4} {:>6} {:>14.6e} {:>12}", r.n, r.beta, r.ratio, step);
    }
    let last: Vec<String> =
        rows.iter().filter(|r| r.n == 25).map(|r| format!("beta={} ratio={:.2e}", r.beta, r.ratio)).collect();
    Ok(Outcome::new(
        complete,
        format!(
            "ratio study recorded for 3 betas, n = 1..=25 ({}); the asymptotic statement is not accepted: \
             no tested beta gives a ratio converging to 1",
            last.join(", ")
        ),
    ))
}

fn criterion_14() -> Result<Outcome> {
    let series = yor::yor_polyseries(1.0, 2.0, 8)?;
    let reference = yor::yor_spectral(1.0, 2.0, &QuadratureSpec::default())?.value;
    let c = CrossCheckReport::relative("K=8", series.point.value, reference, EXPANSION_TOL);
    Ok(Outcome::new(
        relative_ok(&c, EXPANSION_TOL),
        format!(
            "K=8 sum {:.10} vs spectral {:.10}, relative {:.2e} (limit {EXPANSION_TOL:e}); corrected weight 1/2",
            c.lhs, c.rhs, c.rel_diff
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 14] = [
        ("exact polynomial equivalence", criterion_1),
        ("combinatorial identities", criterion_2),
        ("leading coefficient", criterion_3),
        ("cross-representation", criterion_4),
        ("KL image of F_t", criterion_5),
        ("squared norm of F_t", criterion_6),
        ("Macdonald formula", criterion_7),
        ("semigroup and index law", criterion_8),
        ("Bernoulli integral", criterion_9),
        ("polynomial bound", criterion_10),
        ("diffusion residual and derivative bound", criterion_11),
        ("Bessel series and generating function", criterion_12),
        ("asymptotic ratio study", criterion_13),
        ("polynomial expansion of F_t", criterion_14),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{secs:.1} s]", i + 1, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
