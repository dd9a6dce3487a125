//! Rebuilds a (39,3)-arc in PG(2,25) from the cyclic group of the bundled arc.

use std::time::Duration;

use pg2arcs::arcs::{corpus_entry, format_arc_file, verify_arc, Arc};
use pg2arcs::condense::{condense, expand_solution};
use pg2arcs::group::orbits;
use pg2arcs::solver::{solve_feasible, IlpModel, SolveOptions};

fn main() -> pg2arcs::Result<()> {
    let file = corpus_entry(25, 3).expect("bundled arc").load()?;
    let group = file.group.as_ref().expect("group");
    let orb = orbits(&file.plane, group)?;
    let model = IlpModel::new(condense(&file.plane, &orb, 3)?);
    println!("condensed system: {} orbits", model.ell());
    let opts = SolveOptions {
        budget: Duration::from_secs(600),
        local_search_iterations: 200_000,
        ..Default::default()
    };
    let sol = solve_feasible(&model, 39, &opts);
    println!("{} with {} points after {:.2?}", sol.status, sol.objective, sol.wall_time);
    let arc = Arc::new(&file.plane, expand_solution(&orb, &sol.x)?, Some(3))?;
    println!("{}", verify_arc(&arc)?);
    print!("{}", format_arc_file(&file.spec, &arc, 3, Some(group.generators())));
    Ok(())
}
