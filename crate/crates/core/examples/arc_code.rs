//! The linear [n,3,n-r] code attached to an arc.

use pg2arcs::arcs::{corpus_entry, min_distance, to_generator_matrix};

fn main() -> pg2arcs::Result<()> {
    let file = corpus_entry(25, 3).expect("bundled arc").load()?;
    let gen = to_generator_matrix(&file.arc)?;
    let d = min_distance(&file.spec, &gen)?;
    println!("generator matrix has rank {}", gen.rank(&file.spec));
    println!("[{}, 3, {d}] code over GF({})", gen.n(), file.spec.order());
    Ok(())
}
