//! The polynomials p_n generated by x^2 - x d/dx x d/dx acting on e^{-x}:
//! exact coefficients, identities, bounds and series representations.

use yorkl::polys::{
    asymptotic_ratio_study, generating_check, poly_bound, poly_eval, poly_explicit, poly_recurrence,
    poly_series_bessel, verify_identities, BoundParams,
};

fn main() -> yorkl::Result<()> {
    for n in 0..=5 {
        let p = poly_recurrence(n);
        let terms: Vec<String> = p.coeffs().iter().enumerate().rev().filter(|(_, c)| c.to_string() != "0")
            .map(|(k, c)| format!("{c} x^{k}"))
            .collect();
        println!("p_{n}(x) = {}", terms.join(" + "));
    }
    println!("p_30 leading coefficient = {}", poly_recurrence(30).leading());
    println!("explicit formula agrees at n = 30: {}", poly_explicit(30)? == poly_recurrence(30));

    let suite = verify_identities(20)?;
    println!("{} exact identity checks up to n = 20, all pass: {}", suite.len(), suite.all_passed());

    let p5 = poly_recurrence(5);
    let params = BoundParams::at_endpoint(0.5)?;
    println!("|p_5(3)| = {:.6e} <= bound {:.6e}", poly_eval(&p5, 3.0).abs(), poly_bound(5, 3.0, &params)?);

    let s = poly_series_bessel(3, 2.0, 60)?;
    println!("Bessel series for p_3(2): {:.12} ({} terms)", s.value, s.terms_used);

    let g = generating_check(2.0, 1.0, 20, 1e-8)?;
    println!("generating function at x=2, t=1: {:.15} vs {:.15}", g.lhs, g.rhs);

    println!("\nratio of p_n(1) to the large-n main term");
    for row in asymptotic_ratio_study(1.0, &[0.5, 1.0, 1.5], 25)?.iter().filter(|r| r.n % 5 == 0) {
        println!("beta = {:.1} n = {:>2} ratio = {:>12.4e}", row.beta, row.n, row.ratio);
    }
    Ok(())
}
