//! F_t(r) as a series in the polynomial coefficients a_k(r, t).

use yorkl::quadrature::QuadratureSpec;
use yorkl::yor;

fn main() -> yorkl::Result<()> {
    let (r, t) = (1.0, 2.0);
    let reference = yor::yor_spectral(r, t, &QuadratureSpec::default())?.value;
    let s = yor::yor_polyseries(r, t, 8)?;
    let mut partial = 0.0;
    println!("{:>2} {:>20} {:>20} {:>12}", "k", "term", "partial sum", "error");
    for (k, term) in s.terms.iter().enumerate() {
        partial += term;
        println!("{:>2} {:>20.12e} {:>20.12e} {:>12.2e}", k + 1, term, partial, partial - reference);
    }
    println!("tail estimate {:.2e}; spectral value {reference:.12e}", s.tail_estimate);
    Ok(())
}
