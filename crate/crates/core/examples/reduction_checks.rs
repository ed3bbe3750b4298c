//! Check tabulated Heegner polynomials against the mod-2/3 shapes, the
//! root pairing mod l and the root-location table.

use superspecial::reduction::{check_heegner, unpaired_divisor};
use superspecial::table::HeegnerTable;

fn main() -> superspecial::Result<()> {
    let table = HeegnerTable::resolve(None)?;
    for d in table.discriminants() {
        let Some(entry) = table.get_valid(d)? else { continue };
        let report = check_heegner(d, &entry.coeffs)?;
        println!("D = {d}  ({}, l = {})  {}", report.family.label(), report.l,
            if report.all_pass() { "all checks pass" } else { "VIOLATION" });
        for row in &report.rows {
            println!("    {:<36} {:<5} {}", row.check, if row.pass { "ok" } else { "FAIL" }, row.observed);
        }
        let div = unpaired_divisor(&entry.coeffs, report.l)?;
        println!("    odd-multiplicity roots mod {}: {:?}", div.l, div.residues);
    }
    Ok(())
}
