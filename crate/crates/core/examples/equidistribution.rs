//! Unit-log pairs of primes split in ℚ(√2) and ℚ(√6) and their star
//! discrepancy for growing bounds.

use superspecial::quadratic::{equidist_diagnostic, fundamental_unit};

fn main() -> superspecial::Result<()> {
    for m in [2, 3, 6] {
        let u = fundamental_unit(m);
        println!("ε = {} + {}√{m}", u.a, u.b);
    }
    for bound in [1_000u64, 10_000, 100_000] {
        let eq = equidist_diagnostic(bound)?;
        println!("l < {bound:>7}: {:>5} primes, discrepancy {:.5}", eq.pairs.len(), eq.discrepancy);
    }
    Ok(())
}
