//! Recompute a small Heegner table and write it to the path given (default
//! standard output).

use superspecial::cm::HeegnerOptions;
use superspecial::quaternion::build_maximal_order;
use superspecial::table::regenerate_table;

fn main() -> superspecial::Result<()> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    let order = build_maximal_order()?;
    let table = regenerate_table(&order, &[-19, -43, -52], HeegnerOptions::default(), out.as_deref())?;
    if out.is_none() {
        print!("{}", table.render());
    }
    Ok(())
}
