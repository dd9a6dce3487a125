//! Arithmetic in GF(25) with the defining polynomial x^2 + x + 2.

use pg2arcs::gf::{FieldElement, FieldSpec};

fn main() -> pg2arcs::Result<()> {
    let f = FieldSpec::new(5, 2, &[2, 1, 1])?;
    println!("field: {f}");
    let x = f.element(5)?; // the class of x
    let a = f.element(13)?;
    println!("x * x = {}", f.mul(x, x).code());
    println!("13 + 5 = {}", f.add(a, x).code());
    println!("13^-1 = {}", f.inv(a)?.code());
    println!("frobenius(13) = {}", f.frobenius(a, 1).code());
    let primitive = f
        .nonzero_elements()
        .find(|&g| (1..24).all(|k| f.pow(g, k) != FieldElement::ONE))
        .expect("cyclic multiplicative group");
    println!("smallest primitive element: {}", primitive.code());
    Ok(())
}
