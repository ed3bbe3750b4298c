//! Build the maximal order of the discriminant-6 algebra and print its
//! distinguished elements.

use superspecial::quaternion::{build_maximal_order, iota_fingerprint};

fn main() -> superspecial::Result<()> {
    let order = build_maximal_order()?;
    println!("basis:");
    for e in order.basis() {
        println!("  {e}    trd {}  nrd {}", e.trd(), e.nrd());
    }
    println!("reduced discriminant: {}", order.reduced_discriminant());
    println!("mu = {}  (mu^2 = {})", order.mu, &order.mu * &order.mu);
    for (d, chi) in &order.chi {
        println!("chi_{d} = {chi}  trd {}  nrd {}", chi.trd(), chi.nrd());
    }
    println!("Riemann form Gram matrix on the basis:");
    for row in order.riemann_gram() {
        let cells: Vec<String> = row.iter().map(|r| format!("{r:>3}")).collect();
        println!("  [{}]", cells.join(" "));
    }
    println!("splitting fingerprint: {}", iota_fingerprint());
    Ok(())
}
