//! Forward and inverse Kontorovich-Lebedev transforms, the roundtrip and the
//! Parseval identity.

use std::f64::consts::PI;

use yorkl::kl::{self, SpectralDecay, SpectralFunction, TestFunction};
use yorkl::quadrature::QuadratureSpec;

fn main() -> yorkl::Result<()> {
    let spec = QuadratureSpec::default();
    let e = TestFunction::Exponential { rate: 1.0 };

    println!("{:>5} {:>22} {:>22} {:>22}", "tau", "G[e^-r] kernel", "G[e^-r] Laplace", "pi tau / sinh(pi tau)");
    for &tau in &[0.25, 1.0, 3.0] {
        let a = kl::kl_forward(&e, tau, &spec)?;
        let b = kl::kl_forward_laplace(&e, tau, &spec)?.value;
        println!("{tau:>5} {a:>22.15e} {b:>22.15e} {:>22.15e}", PI * tau / (PI * tau).sinh());
    }

    let one = kl::kl_forward(&TestFunction::Constant(1.0), 1.0, &spec)?;
    println!("G[1](1) = {one:.15} (closed form {:.15})", PI / (2.0 * (PI / 2.0).cosh()));

    let f = kl::kl_inverse(&SpectralFunction::gaussian(1.0), 1.0, &spec)?;
    println!("inverse of e^(-tau^2/2) at r=1: {f:.15}");
    let f = kl::kl_inverse(&SpectralFunction::poly_image(1), 1.0, &spec)?;
    println!("inverse of -pi tau / sinh(pi tau) at r=1: {f:.15} (-e^-1 = {:.15})", -(-1.0f64).exp());

    let rt = kl::roundtrip_check(&e, SpectralDecay::Exponential { rate: PI, power: 1.0 }, 1.0)?;
    println!("roundtrip at r=1: {:.12} vs {:.12} (rel {:.1e})", rt.lhs, rt.rhs, rt.rel_diff);

    let p = kl::parseval_check(&e, &spec)?;
    println!("Parseval for e^-r: {:.12} vs {:.12} passed {}", p.lhs, p.rhs, p.passed);
    Ok(())
}
