//! Class numbers, embedding counts and h′ for the three discriminant
//! families, with the predicted parities.

use superspecial::arith::primes_up_to;
use superspecial::quadratic::{parity_check, quad_order_data, Family};

fn main() -> superspecial::Result<()> {
    let bound = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200u64);
    for fam in [Family::FourL13, Family::L19, Family::ThreeL1] {
        println!("{}", fam.label());
        println!("  {:>6} {:>7} {:>4} {:>4} {:>4} {:>4}  verdict", "l", "D", "h", "s", "#W″", "h′");
        for l in primes_up_to(bound).into_iter().filter(|l| l % 24 == fam.residue()) {
            let d = fam.disc(l);
            let q = quad_order_data(d)?;
            println!(
                "  {l:>6} {d:>7} {:>4} {:>4} {:>4} {:>4}  {:?}",
                q.h,
                q.s,
                q.w2_size,
                q.h_prime.to_string(),
                parity_check(fam, l)?
            );
        }
    }
    Ok(())
}
