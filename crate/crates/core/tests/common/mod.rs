//! Helpers shared by the integration tests, including oracles that do not go through the
//! library's own search code.
#![allow(dead_code)]

use pg2arcs::geometry::Plane;
use pg2arcs::gf::{FieldElement, FieldSpec};
use pg2arcs::group::GroupElement;
use pg2arcs::matrix::Mat3;
use rand::Rng;

/// Uniformly random invertible matrix, optionally with a random Frobenius twist.
pub fn random_element<R: Rng>(spec: &FieldSpec, rng: &mut R, semilinear: bool) -> GroupElement {
    let q = spec.order();
    loop {
        let codes: Vec<u32> = (0..9).map(|_| rng.gen_range(0..q)).collect();
        let m = Mat3::from_codes(spec, &codes).unwrap();
        if m.det(spec).is_zero() {
            continue;
        }
        let frob = if semilinear { rng.gen_range(0..spec.e()) } else { 0 };
        return GroupElement::new(spec, m, frob).unwrap();
    }
}

/// Per-line multiplicities computed straight from dot products, without the plane's
/// incidence lists.
pub fn multiplicities_by_dot(plane: &Plane, points: &[u32]) -> Vec<u32> {
    let spec = plane.spec();
    (0..plane.size())
        .map(|l| {
            let h = plane.line(l).dual();
            points
                .iter()
                .filter(|&&p| {
                    let x = plane.point(p as usize).coords();
                    let mut s = FieldElement::ZERO;
                    for k in 0..3 {
                        s = spec.add(s, spec.mul(h[k], x[k]));
                    }
                    s.is_zero()
                })
                .count() as u32
        })
        .collect()
}

/// Largest `(n, r)`-arc of a small plane by plain backtracking over point indices.
pub fn max_arc_by_backtracking(plane: &Plane, r: u32) -> usize {
    fn go(plane: &Plane, r: u32, next: usize, loads: &mut Vec<u32>, size: usize, best: &mut usize) {
        let n = plane.size();
        if size + (n - next) <= *best {
            return;
        }
        if size > *best {
            *best = size;
        }
        for p in next..n {
            if size + (n - p) <= *best {
                return;
            }
            let lines = plane.lines_through(p);
            if lines.iter().all(|&l| loads[l as usize] < r) {
                for &l in lines {
                    loads[l as usize] += 1;
                }
                go(plane, r, p + 1, loads, size + 1, best);
                for &l in lines {
                    loads[l as usize] -= 1;
                }
            }
        }
    }
    let mut loads = vec![0u32; plane.size()];
    let mut best = 0;
    go(plane, r, 0, &mut loads, 0, &mut best);
    best
}
