//! Orbits of a Singer cycle on PG(2,3) and the condensed incidence system.

use pg2arcs::condense::condense;
use pg2arcs::geometry::Plane;
use pg2arcs::gf::FieldSpec;
use pg2arcs::group::{orbits, Group, GroupElement};

fn main() -> pg2arcs::Result<()> {
    let spec = FieldSpec::prime(3)?;
    let plane = Plane::build(&spec);
    // companion matrix of x^3 + 2x + 1, an element of order 13 in PGL(3,3)
    let g = GroupElement::from_codes(&spec, &[0, 0, 2, 1, 0, 1, 0, 1, 0], 0)?;
    let group = Group::cyclic(&spec, g)?;
    let orb = orbits(&plane, &group)?;
    println!("group order {}, {} orbits, lengths {:?}", group.order(), orb.ell(), orb.weights);

    // swapping the first two coordinates gives a group of order 2
    let h = GroupElement::from_codes(&spec, &[0, 1, 0, 1, 0, 0, 0, 0, 1], 0)?;
    let orb = orbits(&plane, &Group::cyclic(&spec, h)?)?;
    let sys = condense(&plane, &orb, 2)?;
    println!("transposition: {} orbits, weights {:?}", sys.ell(), sys.w);
    for row in &sys.a {
        println!("  {row:?}");
    }
    Ok(())
}
