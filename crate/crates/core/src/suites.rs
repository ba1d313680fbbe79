//! Named groups of checks driven by the `suite` and `crosscheck` commands.

use std::f64::consts::PI;

use num_bigint::BigInt;

use crate::bessel::{self, bessel_i_int, bessel_k_imag, bessel_k_imag_dx, bessel_k_real};
use crate::error::Result;
use crate::kl::{self, HeatKernelForm, SpectralDecay, SpectralFunction, TestFunction};
use crate::polys::{self, BoundParams};
use crate::quadrature::QuadratureSpec;
use crate::report::{CheckSuite, CrossCheckReport};
use crate::yor;

pub const DEFAULT_NMAX: usize = 20;
pub const CROSS_REPRESENTATION_TOL: f64 = 1e-8;
pub const CROSS_R: &[f64] = &[0.5, 1.0, 2.0, 5.0, 10.0];
pub const CROSS_T: &[f64] = &[0.5, 1.0, 2.0, 5.0];

/// `F_1(1)` to 20 digits.
pub const F_1_1: f64 = 0.739_076_531_303_231_916_97;
const K0_1: f64 = 0.421_024_438_240_708_333_335_627_4;
const I1_2: f64 = 1.590_636_854_637_329_063_382_254;

/// Relative agreement of the direct and spectral forms of `F_t(r)`.
pub fn cross_representation(r: f64, t: f64, tolerance: f64, spec: &QuadratureSpec) -> Result<CrossCheckReport> {
    let d = yor::yor_direct(r, t, spec)?;
    let s = yor::yor_spectral(r, t, spec)?;
    Ok(CrossCheckReport::relative(format!("direct vs spectral r={r} t={t}"), d.value, s.value, tolerance))
}

/// Exact identities, the growth bound, the Bessel series, the generating
/// function, the Bernoulli integral and the KL images of `e^{-x} p_n / x`.
pub fn polys_suite(n_max: usize) -> Result<CheckSuite> {
    let mut s = polys::verify_identities(n_max)?;
    s.name = "polys".into();
    for (n, p) in polys::poly_table(n_max).iter().enumerate().skip(1) {
        let mut expected = polys::double_factorial_odd(n);
        if n % 2 == 1 {
            expected = -expected;
        }
        s.push(CrossCheckReport::exact(
            format!("leading coefficient n={n}"),
            big_f64(p.leading()),
            big_f64(&expected),
            *p.leading() == expected,
        ));
    }
    for n in 1..=3 {
        s.push(polys::verify_bernoulli_integral(n)?);
    }
    let params = [BoundParams::new(1.0, 2.0)?, BoundParams::at_endpoint(0.5)?];
    let table = polys::poly_table(10);
    for (n, p) in table.iter().enumerate().skip(1) {
        for &x in &[0.1, 1.0, 3.0] {
            for prm in &params {
                let bound = polys::poly_bound(n, x, prm)?;
                s.push(CrossCheckReport::upper_bound(
                    format!("bound n={n} x={x} eps={} alpha={:.6}", prm.epsilon(), prm.alpha()),
                    polys::poly_eval(p, x).abs(),
                    bound,
                ));
            }
        }
    }
    for (n, p) in table.iter().enumerate().take(7).skip(1) {
        for &x in &[0.1, 1.0, 2.0, 5.0] {
            let m = polys::series_peak_index(n, x) + 60;
            let series = polys::poly_series_bessel(n, x, m)?;
            s.push(CrossCheckReport::relative(
                format!("Bessel series n={n} x={x}"),
                series.value,
                polys::poly_eval(p, x),
                1e-6,
            ));
        }
    }
    s.push(polys::generating_check(0.0, 0.5, 12, 1e-10)?);
    s.push(polys::generating_check(1.0, 0.5, 12, 1e-10)?);
    s.push(polys::generating_check(2.0, 1.0, 20, 1e-8)?);
    for &(n, tau) in &[(1, 1.0), (2, 0.5), (3, 2.0)] {
        s.push(polys::poly_kl_image(n, tau)?);
    }
    Ok(s)
}

/// One row per `(beta, n)`: `p_n(1)` over the asymptotic main term.
pub fn ratio_study() -> Result<Vec<polys::RatioRow>> {
    polys::asymptotic_ratio_study(1.0, &[0.5, 1.0, 1.5], 25)
}

fn big_f64(v: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
}

/// Reference values, asymptotics and the bounds `|K_{i tau}| <= K_0` and
/// `|d/dx K_{i tau}(x)| <= e^{-delta tau} K_1(x cos delta)`.
pub fn bessel_suite() -> Result<CheckSuite> {
    let mut s = bessel::check_k_asymptotics(&[10.0, 20.0, 40.0, 1e-2, 1e-3, 1e-4])?;
    s.name = "bessel".into();
    s.push(CrossCheckReport::new("K_0(1)", bessel_k_real(0.0, 1.0)?, K0_1, 1e-13));
    s.push(CrossCheckReport::new(
        "K_1/2(2) closed form",
        bessel_k_real(0.5, 2.0)?,
        (PI / 4.0).sqrt() * (-2.0f64).exp(),
        1e-13,
    ));
    s.push(CrossCheckReport::new("K_i0(1) = K_0(1)", bessel_k_imag(0.0, 1.0)?, bessel_k_real(0.0, 1.0)?, 1e-14));
    let x = 1e-6;
    s.push(CrossCheckReport::new("K_0(1e-6) / -ln x", bessel_k_real(0.0, x)? / -x.ln(), 1.0, 0.1));
    s.push(CrossCheckReport::exact("I_0(0)", bessel_i_int(0, 0.0), 1.0, bessel_i_int(0, 0.0) == 1.0));
    s.push(CrossCheckReport::exact("I_3(0)", bessel_i_int(3, 0.0), 0.0, bessel_i_int(3, 0.0) == 0.0));
    s.push(CrossCheckReport::new("I_1(2)", bessel_i_int(1, 2.0), I1_2, 1e-14));
    for &x in &[0.01, 0.1, 1.0, 5.0] {
        let k0 = bessel_k_real(0.0, x)?;
        for &tau in &[0.5, 1.0, 2.0, 5.0, 10.0] {
            let k = bessel_k_imag(tau, x)?;
            s.push(CrossCheckReport::upper_bound(format!("|K_i{tau}({x})| <= K_0"), k.abs(), k0));
            let dk = bessel_k_imag_dx(tau, x)?;
            for &delta in &[0.0, PI / 4.0] {
                let bound = (-delta * tau).exp() * bessel_k_real(1.0, x * delta.cos())?;
                // both sides carry the cosine-integral noise of K_1(x)
                let slack = bessel::k_imag_noise(x) * bessel_k_real(1.0, x)? / bessel_k_real(0.0, x)?;
                s.push(CrossCheckReport::upper_bound(
                    format!("|dK_i{tau}({x})/dx| <= bound delta={delta:.4}"),
                    dk.abs() - 8.0 * slack,
                    bound,
                ));
            }
        }
    }
    Ok(s)
}

/// Cross-representation grid, KL image, squared norm, diffusion equation,
/// derivative bounds and the polynomial expansion.
pub fn yor_suite() -> Result<CheckSuite> {
    let spec = QuadratureSpec::default();
    let mut s = CheckSuite::new("yor");
    for &t in CROSS_T {
        for &r in CROSS_R {
            let c = cross_representation(r, t, CROSS_REPRESENTATION_TOL, &spec)?;
            let positive = CrossCheckReport::upper_bound(format!("F_t(r) > 0 r={r} t={t}"), f64::MIN_POSITIVE, c.lhs);
            s.push(c);
            s.push(positive);
        }
    }
    for &t in &[0.5, 1.0, 2.0] {
        for &tau in &[0.5, 1.0, 2.0] {
            s.push(yor::yor_kl_image(tau, t, &spec)?);
        }
    }
    for &t in &[0.5, 1.0, 2.0, 4.0] {
        s.push(yor::yor_squared_norm(t, &spec)?);
    }
    for &r in &[0.5, 1.0, 3.0] {
        for &t in &[0.5, 1.0, 2.0] {
            s.push(yor::diffusion_residual(r, t)?);
        }
    }
    for &r in &[0.5, 1.0, 2.0, 10.0] {
        for &t in &[0.5, 1.0, 2.0] {
            for m in 0..=2 {
                s.push(yor::derivative_bound_check(r, t, m)?);
            }
        }
    }
    let h = 1e-4;
    let fd = (yor::yor_spectral(1.0, 1.0 + h, &spec)?.value - yor::yor_spectral(1.0, 1.0 - h, &spec)?.value) / (2.0 * h);
    s.push(CrossCheckReport::new("dF/dt at r=1 t=1", yor::yor_dt_derivative(1.0, 1.0, 1, &spec)?, fd, 1e-6));
    let six = yor::yor_polyseries(1.0, 2.0, 6)?;
    let eight = yor::yor_polyseries(1.0, 2.0, 8)?;
    let reference = yor::yor_spectral(1.0, 2.0, &spec)?.value;
    s.push(CrossCheckReport::new("expansion K=6 at r=1 t=2", six.point.value, reference, 1e-2));
    s.push(CrossCheckReport::new("expansion K=8 at r=1 t=2", eight.point.value, reference, 1e-3));
    s.push(CrossCheckReport::upper_bound(
        "expansion K=8 closer than K=6",
        (eight.point.value - reference).abs(),
        (six.point.value - reference).abs(),
    ));
    s.push(yor::polyseries_term_identity(1.0, 2.0, 1)?);
    Ok(s)
}

/// Closed-form transforms, inversion, Parseval, Macdonald, factorization,
/// heat kernel, semigroup and index law.
pub fn kl_suite() -> Result<CheckSuite> {
    let spec = QuadratureSpec::default();
    let mut s = CheckSuite::new("kl");
    for &tau in &[0.0, 0.5, 1.0] {
        let exact = PI / (2.0 * (0.5 * PI * tau).cosh());
        s.push(CrossCheckReport::new(
            format!("G[1]({tau})"),
            kl::kl_forward(&TestFunction::Constant(1.0), tau, &spec)?,
            exact,
            1e-9,
        ));
    }
    for &tau in &[0.5, 1.0, 2.0] {
        let exact = -PI * tau / (PI * tau).sinh();
        s.push(CrossCheckReport::new(
            format!("G[-e^-r]({tau})"),
            kl::kl_forward(&TestFunction::poly_kernel(1), tau, &spec)?,
            exact,
            1e-9,
        ));
    }
    s.push(CrossCheckReport::relative(
        "inverse of gaussian t=1 at r=1",
        kl::kl_inverse(&SpectralFunction::gaussian(1.0), 1.0, &spec)?,
        2.0 * F_1_1,
        1e-8,
    ));
    s.push(CrossCheckReport::relative(
        "inverse of poly image n=1 at r=1",
        kl::kl_inverse(&SpectralFunction::poly_image(1), 1.0, &spec)?,
        -(-1.0f64).exp(),
        1e-8,
    ));
    for &r in &[0.5, 1.0, 2.0] {
        s.push(kl::roundtrip_check(
            &TestFunction::Exponential { rate: 1.0 },
            SpectralDecay::Exponential { rate: PI, power: 1.0 },
            r,
        )?);
    }
    let e = TestFunction::Exponential { rate: 1.0 };
    let f_half = TestFunction::yor_sampled(0.5)?;
    let f_one = TestFunction::yor_sampled(1.0)?;
    let f_two = TestFunction::yor_sampled(2.0)?;
    let parseval_f = |t: f64| 0.5 * PI * PI * yor::squared_norm_closed_form(t);
    let p1 = kl::parseval_check(&f_one, &spec)?;
    s.push(CrossCheckReport::relative("Parseval F_1 against the closed-form norm", p1.lhs, parseval_f(1.0), 1e-5));
    s.push(p1);
    s.push(kl::parseval_check(&e, &spec)?);
    let p2 = kl::parseval_check(&f_two, &spec)?;
    s.push(CrossCheckReport::relative("Parseval F_2 against the closed-form norm", p2.lhs, parseval_f(2.0), 1e-5));
    s.push(p2);
    for &tau in &[0.0, 0.5, 1.0] {
        for &(x, y) in &[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)] {
            s.push(kl::macdonald_check(tau, x, y, &spec)?);
        }
    }
    let ff = kl::factorization_check(&f_half, &f_half, 1.0, &spec)?;
    s.push(CrossCheckReport::relative("G[F_0.5 * F_0.5](1) = e^(-1/2)/4", ff.lhs, 0.25 * (-0.5f64).exp(), 1e-4));
    s.push(ff);
    s.push(kl::factorization_check(&e, &e, 1.0, &spec)?);
    s.push(kl::factorization_check(&e, &f_one, 0.5, &spec)?);
    let hk = kl::heat_kernel(1.0, 1.0, 1.0, &spec)?;
    s.push(CrossCheckReport::upper_bound("heat kernel t=1 x=y=1 positive", 0.0, hk.value));
    let a = kl::heat_kernel(1.0, 1.0, 2.0, &spec)?.value;
    let b = kl::heat_kernel(1.0, 2.0, 1.0, &spec)?.value;
    s.push(CrossCheckReport::new("heat kernel x h(x,y) = y h(y,x) t=1 (1, 2)", a, 2.0 * b, 1e-10));
    let translation = HeatKernelForm::translation_sampled(1.0)?;
    s.push(CrossCheckReport::relative(
        "heat kernel forms t=1 (1, 2)",
        kl::heat_kernel_value(1.0, 1.0, 2.0, &translation, &spec)?,
        a,
        1e-6,
    ));
    let one_one = kl::semigroup_check(1.0, 1.0, 1.0, &spec)?;
    let split = kl::semigroup_check(1.5, 0.5, 1.0, &spec)?;
    s.push(CrossCheckReport::new("semigroup (1,1) vs (1.5,0.5) at r=1", one_one.lhs, split.lhs, 2e-4));
    s.push(one_one);
    s.push(kl::semigroup_check(0.5, 1.5, 2.0, &spec)?);
    s.push(kl::index_law_check(1.0, 1.0, 1.0, &spec)?);
    s.push(kl::index_law_check(0.5, 1.5, 2.0, &spec)?);
    for (label, f) in [("e^-r", e), ("F_1", f_one)] {
        let finite = kl::l_alpha_norm(&f, 0.0, &spec)?.is_finite();
        s.push(CrossCheckReport::exact(format!("L_0 norm of {label} finite"), 1.0, 1.0, finite));
    }
    Ok(s)
}
