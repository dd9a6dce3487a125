//! Points and lines of PG(2,2) and its incidence matrix.

use pg2arcs::geometry::Plane;
use pg2arcs::gf::FieldSpec;

fn main() -> pg2arcs::Result<()> {
    let plane = Plane::build(&FieldSpec::from_order(2)?);
    for (i, p) in plane.points().iter().enumerate() {
        println!("P{i} = {p}");
    }
    let m = plane.incidence_matrix();
    println!("incidence matrix (rows are lines):");
    for i in 0..m.rows() {
        let row: String = m.row(i).iter().map(|v| char::from(b'0' + v)).collect();
        println!("  L{i} {}  {row}", plane.line(i));
    }
    Ok(())
}
