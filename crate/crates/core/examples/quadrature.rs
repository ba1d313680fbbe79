//! Adaptive Gauss-Legendre quadrature on finite, semi-infinite and
//! oscillatory integrals.

use std::f64::consts::PI;

use yorkl::quadrature::{
    integrate_damped_oscillatory, integrate_finite, integrate_semi_infinite, Oscillation, QuadratureSpec,
};

fn main() -> yorkl::Result<()> {
    let spec = QuadratureSpec::default();

    let r = integrate_finite(f64::sin, 0.0, PI, &spec)?;
    println!("int_0^pi sin x dx         = {:.16} (err {:.1e}, {} nodes)", r.value, r.error_estimate, r.nodes_used);

    let r = integrate_semi_infinite(|x: f64| (-x * x).exp(), 0.0, |x: f64| x * x, &spec)?;
    println!("int_0^inf e^-x^2 dx       = {:.16} (exact {:.16})", r.value, PI.sqrt() / 2.0);

    // int_0^inf e^{-x} cos(10 x) dx = 1 / 101
    let r = integrate_damped_oscillatory(|x: f64| (-x).exp(), 10.0, Oscillation::Cos, |x| x, &spec)?;
    println!("int_0^inf e^-x cos 10x dx = {:.16} (exact {:.16})", r.value, 1.0 / 101.0);

    let loose = spec.with_rel_tol(1e-6);
    let r = integrate_finite(|x: f64| x.sqrt(), 0.0, 1.0, &loose)?;
    println!("int_0^1 sqrt x dx at 1e-6 = {:.10} ({} nodes, converged: {})", r.value, r.nodes_used, r.converged);
    Ok(())
}
