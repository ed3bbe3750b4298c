//! Search for a prime of superspecial reduction for a moduli point given by
//! its minimal polynomial, e.g. `cargo run --example find_prime -- "x + 1/2"`.

use superspecial::config::Config;
use superspecial::quaternion::build_maximal_order;
use superspecial::search::{find_superspecial, parse_moduli_str};
use superspecial::table::HeegnerTable;

fn main() -> superspecial::Result<()> {
    let poly = std::env::args().nth(1).unwrap_or_else(|| "x - 1".to_string());
    let order = build_maximal_order()?;
    let table = HeegnerTable::resolve(None)?;
    let input = parse_moduli_str(&poly, 1)?;
    let t = std::time::Instant::now();
    let out = find_superspecial(&input, &Config::default(), &table, &order)?;
    println!("{}", out.certificate.to_json());
    println!("case {} after {} of {} candidates ({:.1?})", out.stats.case, out.stats.tried, out.stats.candidates, t.elapsed());
    for (why, n) in &out.stats.rejected {
        println!("  rejected {n}: {why}");
    }
    Ok(())
}
