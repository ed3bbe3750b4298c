//! Compute P_D for a discriminant given on the command line (default −43)
//! and show that doubling the precision leaves it unchanged.

use superspecial::cm::{heegner_poly, HeegnerOptions};
use superspecial::quaternion::build_maximal_order;

fn main() -> superspecial::Result<()> {
    let d: i64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(-43);
    let order = build_maximal_order()?;
    let lo = heegner_poly(&order, d, HeegnerOptions { digits: 60, ..Default::default() })?;
    let hi = heegner_poly(&order, d, HeegnerOptions { digits: 120, ..Default::default() })?;
    println!("P_{d}(x) = {}", lo.poly());
    println!("h′ = {}, b = {}, embeddings up to height {}", lo.hprime, lo.b, lo.height);
    for (re, im) in &lo.roots {
        println!("  root {re:.20} {im:+.2e}i");
    }
    println!("stable at 60 and 120 digits: {}", lo.coeffs == hi.coeffs);
    Ok(())
}
