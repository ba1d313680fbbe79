//! The Yor integral F_t(r) by two independent routes, its time derivatives
//! and the diffusion equation satisfied by r F_t(r).

use yorkl::quadrature::QuadratureSpec;
use yorkl::yor;

fn main() -> yorkl::Result<()> {
    let spec = QuadratureSpec::default();
    println!("{:>5} {:>5} {:>24} {:>24} {:>9}", "r", "t", "direct", "spectral", "rel diff");
    for &t in &[0.5, 1.0, 2.0] {
        for &r in &[0.5, 1.0, 5.0] {
            let d = yor::yor_direct(r, t, &spec)?;
            let s = yor::yor_spectral(r, t, &spec)?;
            println!("{r:>5} {t:>5} {:>24.16e} {:>24.16e} {:>9.1e}", d.value, s.value, (d.value - s.value).abs() / d.value);
        }
    }

    for m in 0..=3 {
        println!("d^{m}F/dt^{m} at r=1, t=1: {:.12e}", yor::yor_dt_derivative(1.0, 1.0, m, &spec)?);
    }

    let c = yor::diffusion_residual(1.0, 1.0)?;
    println!("diffusion equation at (1, 1): lhs {:.10} rhs {:.10} passed {}", c.lhs, c.rhs, c.passed);

    let c = yor::yor_squared_norm(1.0, &spec)?;
    println!("int F_1^2 r dr = {:.12} (closed form {:.12})", c.lhs, c.rhs);

    match yor::yor_direct(1.0, 0.05, &spec) {
        Ok(_) => println!("t = 0.05 evaluated"),
        Err(e) => println!("t = 0.05 refused: {e}"),
    }
    Ok(())
}
