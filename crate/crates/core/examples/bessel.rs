//! Modified Bessel functions of real and imaginary order.

use std::f64::consts::PI;

use yorkl::bessel::{bessel_i_int, bessel_k_imag, bessel_k_real, check_k_asymptotics, k_imag_noise};

fn main() -> yorkl::Result<()> {
    println!("K_0(1)    = {:.16}", bessel_k_real(0.0, 1.0)?);
    println!("K_1/2(2)  = {:.16} (closed form {:.16})", bessel_k_real(0.5, 2.0)?, (PI / 4.0).sqrt() * (-2.0f64).exp());
    println!("I_1(2)    = {:.16}", bessel_i_int(1, 2.0));

    println!("\nK_(i tau)(x): oscillatory in tau, bounded by K_0(x)");
    println!("{:>6} {:>8} {:>24} {:>10}", "tau", "x", "K_(i tau)(x)", "abs noise");
    for &x in &[0.01, 1.0, 5.0] {
        for &tau in &[0.0, 1.0, 2.0, 5.0] {
            println!("{tau:>6} {x:>8} {:>24.16e} {:>10.1e}", bessel_k_imag(tau, x)?, k_imag_noise(x));
        }
    }

    println!("\nK_0 against its asymptotes");
    for c in check_k_asymptotics(&[1e-4, 1e-2, 10.0, 40.0])?.checks {
        println!("{:<24} K_0 = {:.6e}  asymptote = {:.6e}  pass = {}", c.context, c.lhs, c.rhs, c.passed);
    }
    Ok(())
}
