//! Conjugacy classes of elements and of cyclic subgroups of PGL(3,p).

use pg2arcs::classify::{class_counts, enumerate_cyclic_classes};

fn main() -> pg2arcs::Result<()> {
    for p in [2u32, 3, 5, 7, 11, 13] {
        let classes = enumerate_cyclic_classes(p)?;
        let c = class_counts(&classes);
        println!("p={p}: {} element classes, {} cyclic subgroup classes", c.total, c.subgroups);
    }
    for c in enumerate_cyclic_classes(5)?.iter().take(6) {
        println!("  class {} order {} subgroup {} generator {}", c.id, c.projective_order, c.subgroup, c.generator.mat());
    }
    Ok(())
}
