//! Every nontrivial cyclic group is excluded as an automorphism group of a (7,2)-arc in PG(2,5).

use pg2arcs::classify::{run_exclusion, ExclusionOptions};

fn main() -> pg2arcs::Result<()> {
    let rep = run_exclusion(5, 2, 7, &ExclusionOptions::default())?;
    print!("{}", rep.to_text(true));
    Ok(())
}
