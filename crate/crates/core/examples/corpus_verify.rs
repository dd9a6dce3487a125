//! Verifies the bundled arcs and their automorphism groups.

use pg2arcs::arcs::{admits_group, corpus, verify_arc};

fn main() -> pg2arcs::Result<()> {
    for entry in corpus() {
        let file = entry.load()?;
        let rep = verify_arc(&file.arc)?;
        let group = file.group.as_ref().expect("corpus arcs list a group");
        println!(
            "{}: n={} r={} lines at r: {} group order {} admitted {}",
            entry.name,
            rep.n,
            rep.max_multiplicity,
            rep.lines_at_max,
            group.order(),
            admits_group(&file.arc, group)?
        );
    }
    Ok(())
}
