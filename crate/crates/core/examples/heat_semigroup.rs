//! The heat kernel of the transform, its semigroup property, the index law
//! of the Yor integral under convolution, and the Macdonald product formula.

use yorkl::kl::{self, HeatKernelForm};
use yorkl::quadrature::QuadratureSpec;

fn main() -> yorkl::Result<()> {
    let spec = QuadratureSpec::default();

    let h = kl::heat_kernel(1.0, 0.7, 1.6, &spec)?;
    let t = kl::heat_kernel_value(1.0, 0.7, 1.6, &HeatKernelForm::translation_sampled(1.0)?, &spec)?;
    println!("h_1(0.7, 1.6): spectral {:.12e}, translation {:.12e}", h.value, t);

    for (t1, t2, r) in [(1.0, 1.0, 1.0), (0.5, 1.5, 2.0)] {
        let c = kl::semigroup_check(t1, t2, r, &spec)?;
        println!("semigroup t1={t1} t2={t2} r={r}: {:.8e} vs {:.8e} passed {}", c.lhs, c.rhs, c.passed);
    }

    let c = kl::index_law_check(1.0, 1.0, 1.0, &spec)?;
    println!("(F_1 * F_1)(1) = {:.10e}, F_2(1) / 2 = {:.10e}", c.lhs, c.rhs);

    for (tau, x, y) in [(0.0, 1.0, 1.0), (1.0, 1.0, 2.0)] {
        let c = kl::macdonald_check(tau, x, y, &spec)?;
        println!("Macdonald tau={tau} x={x} y={y}: {:.14e} vs {:.14e}", c.lhs, c.rhs);
    }
    Ok(())
}
