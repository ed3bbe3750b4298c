//! The hauptmodul at the three elliptic points and at a few other CM
//! points, via the Schwarz triangle map.

use superspecial::cm::{fixed_point, j_from_t, Uniformizer};
use superspecial::quaternion::build_maximal_order;

fn main() -> superspecial::Result<()> {
    let order = build_maximal_order()?;
    let u = Uniformizer::new(&order, 50)?;
    for d in [-24i64, -4, -3, -19, -43, -52] {
        let (_, beta) = &order.embedding_classes(d, 8)[0];
        let tau = fixed_point(beta, u.prec())?;
        let t = u.uniformizer_t(&tau)?;
        let j = j_from_t(&t);
        println!("D = {d:>4}  β = {beta:<24} t = {:<40} j = {}", fmt(&t), fmt(&j));
    }
    Ok(())
}

fn fmt(v: &superspecial::cm::TValue) -> String {
    match v.to_f64() {
        None => "∞".into(),
        Some((re, im)) => format!("{re:.15} {:+.1e}i", im),
    }
}
