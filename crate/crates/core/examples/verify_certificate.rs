//! Produce a certificate for j₀ = √2 and check it, then show how the
//! verifier reacts to an altered chain transcript.

use superspecial::config::Config;
use superspecial::quaternion::build_maximal_order;
use superspecial::search::{find_superspecial, parse_moduli_str, verify_certificate};
use superspecial::table::HeegnerTable;

fn main() -> superspecial::Result<()> {
    let order = build_maximal_order()?;
    let table = HeegnerTable::resolve(None)?;
    let cfg = Config::default();
    let input = parse_moduli_str("x^2 - 2", 1)?;
    let cert = find_superspecial(&input, &cfg, &table, &order)?.certificate;
    println!("case {}: D = {}, l = {}, p = {}", cert.case, cert.d, cert.l, cert.p);
    for e in &cert.chain {
        println!("  {:<16} ({}/{}) = {}", e.symbol, short(&e.top), short(&e.bottom), e.value);
    }
    let v = verify_certificate(&cert, Some(&input), &table, &order, &cfg);
    println!("verification: {}", if v.pass { "pass" } else { "fail" });

    let mut forged = cert.clone();
    forged.chain[1].value = -forged.chain[1].value;
    let v = verify_certificate(&forged, Some(&input), &table, &order, &cfg);
    println!("altered transcript: {:?}", v.reasons);
    Ok(())
}

fn short(s: &str) -> String {
    if s.len() > 20 { format!("{}…", &s[..20]) } else { s.to_string() }
}
