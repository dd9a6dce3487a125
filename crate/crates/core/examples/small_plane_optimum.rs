//! Largest (n,r)-arcs of PG(2,q) for small q, by branch-and-bound and by enumeration.

use pg2arcs::geometry::Plane;
use pg2arcs::gf::FieldSpec;
use pg2arcs::solver::{exhaustive_oracle, solve_max, IlpModel, SolveOptions};

fn main() -> pg2arcs::Result<()> {
    for q in [2u32, 3, 4] {
        let plane = Plane::build(&FieldSpec::from_order(q)?);
        for r in 1..=q + 1 {
            let model = IlpModel::full_plane(&plane, r)?;
            let sol = solve_max(&model, &SolveOptions::default());
            let oracle = exhaustive_oracle(&model)?;
            println!(
                "m_{r}(2,{q}) = {} ({}, {} nodes; oracle {})",
                sol.objective, sol.status, sol.nodes_explored, oracle.objective
            );
        }
    }
    Ok(())
}
