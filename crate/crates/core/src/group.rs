//! Subgroups of PΓL(3,q) and their orbits on points and lines.
//!
//! Points are column vectors. An element `(M, k)` sends `x` to `M * x^(p^k)`, the
//! Frobenius twist being applied coordinatewise before the matrix. Lines transform by
//! the inverse transpose, `h -> M^{-T} * h^(p^k)`, which keeps incidence intact.
//!
//! Group file format: one generator per line, nine element codes in row-major order,
//! optionally followed by `frob=<k>`. Lines starting with `#` are comments.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{domain, parse_err, Error, Result};
use crate::geometry::{normalize, Plane, Triple};
use crate::gf::FieldSpec;
use crate::matrix::Mat3;

/// Default bound on the size of a group closure.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Which way matrices act on point coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionConvention {
    /// `x -> M x` on column vectors.
    Column,
    /// `x -> x M` on row vectors, i.e. `M^T` on columns.
    Transpose,
}

impl fmt::Display for ActionConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionConvention::Column => write!(f, "column"),
            ActionConvention::Transpose => write!(f, "transpose"),
        }
    }
}

/// An element of PΓL(3,q): an invertible matrix up to scalars plus a Frobenius exponent.
///
/// The stored matrix is normalized so that its first nonzero entry is 1, which makes
/// `M` and `λM` the same value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    mat: Mat3,
    frob: u8,
}

impl GroupElement {
    pub fn new(spec: &FieldSpec, mat: Mat3, frob: u32) -> Result<Self> {
        for &c in &mat.0 {
            spec.check(c)?;
        }
        if mat.det(spec).is_zero() {
            return domain(format!("generator [{mat}] is not invertible"));
        }
        if frob >= spec.e() {
            return domain(format!("Frobenius exponent {frob} must be below e = {}", spec.e()));
        }
        Ok(GroupElement {
            mat: mat.projective_normal(spec).unwrap(),
            frob: frob as u8,
        })
    }

    pub fn linear(spec: &FieldSpec, mat: Mat3) -> Result<Self> {
        Self::new(spec, mat, 0)
    }

    pub fn from_codes(spec: &FieldSpec, codes: &[u32], frob: u32) -> Result<Self> {
        Self::new(spec, Mat3::from_codes(spec, codes)?, frob)
    }

    pub fn identity() -> Self {
        GroupElement {
            mat: Mat3::identity(),
            frob: 0,
        }
    }

    pub fn mat(&self) -> &Mat3 {
        &self.mat
    }

    pub fn frob(&self) -> u32 {
        self.frob as u32
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, spec: &FieldSpec, other: &GroupElement) -> GroupElement {
        let twisted = other.mat.frobenius(spec, self.frob as u32);
        let mat = self.mat.mul(spec, &twisted);
        GroupElement {
            mat: mat.projective_normal(spec).unwrap(),
            frob: ((self.frob as u32 + other.frob as u32) % spec.e()) as u8,
        }
    }

    pub fn inverse(&self, spec: &FieldSpec) -> GroupElement {
        let e = spec.e();
        let back = (e - self.frob as u32) % e;
        let inv = self.mat.inverse(spec).expect("group elements are invertible");
        GroupElement {
            mat: inv.frobenius(spec, back).projective_normal(spec).unwrap(),
            frob: back as u8,
        }
    }

    pub fn pow(&self, spec: &FieldSpec, k: u64) -> GroupElement {
        let mut result = GroupElement::identity();
        let mut base = *self;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(spec, &base);
            }
            base = base.compose(spec, &base);
            k >>= 1;
        }
        result
    }

    /// Least `m >= 1` with `self^m` the identity.
    pub fn order(&self, spec: &FieldSpec) -> u64 {
        let mut x = *self;
        let mut m = 1;
        while !x.is_identity() {
            x = x.compose(spec, self);
            m += 1;
        }
        m
    }

    /// The same element with its matrix transposed, for the row-vector convention.
    pub fn transposed(&self) -> GroupElement {
        GroupElement {
            mat: self.mat.transpose(),
            frob: self.frob,
        }
    }

    /// `alpha ∘ self ∘ alpha^{-1}`.
    pub fn conjugate_by(&self, spec: &FieldSpec, alpha: &GroupElement) -> GroupElement {
        alpha.compose(spec, self).compose(spec, &alpha.inverse(spec))
    }

    pub fn apply_to_point(&self, spec: &FieldSpec, p: &Triple) -> Triple {
        let x = p.map(|c| spec.frobenius(c, self.frob as u32));
        normalize(spec, self.mat.apply(spec, &x)).expect("invertible image of a nonzero vector")
    }

    pub fn apply_to_line(&self, spec: &FieldSpec, h: &Triple) -> Triple {
        let it = self.mat.inverse(spec).expect("invertible").transpose();
        self.apply_dual(spec, &it, h)
    }

    fn apply_dual(&self, spec: &FieldSpec, inv_t: &Mat3, h: &Triple) -> Triple {
        let y = h.map(|c| spec.frobenius(c, self.frob as u32));
        normalize(spec, inv_t.apply(spec, &y)).expect("invertible image of a nonzero vector")
    }

    /// Image index of every point.
    pub fn point_permutation(&self, plane: &Plane) -> Vec<u32> {
        let spec = plane.spec();
        plane
            .points()
            .iter()
            .map(|p| plane.point_index(self.apply_to_point(spec, &p.0)).unwrap() as u32)
            .collect()
    }

    /// Image index of every line.
    pub fn line_permutation(&self, plane: &Plane) -> Vec<u32> {
        let spec = plane.spec();
        let inv_t = self.mat.inverse(spec).expect("invertible").transpose();
        plane
            .points()
            .iter()
            .map(|h| plane.line_index(self.apply_dual(spec, &inv_t, &h.0)).unwrap() as u32)
            .collect()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mat)?;
        if self.frob != 0 {
            write!(f, " frob={}", self.frob)?;
        }
        Ok(())
    }
}

/// A finite subgroup given by generators, with its full element list.
#[derive(Clone, Debug)]
pub struct Group {
    spec: FieldSpec,
    generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
}

impl Group {
    pub fn trivial(spec: &FieldSpec) -> Group {
        Group {
            spec: spec.clone(),
            generators: Vec::new(),
            elements: vec![GroupElement::identity()],
        }
    }

    /// Breadth-first closure of `generators`; fails once more than `cap` elements appear.
    pub fn closure(spec: &FieldSpec, generators: &[GroupElement], cap: usize) -> Result<Group> {
        let mut elements = vec![GroupElement::identity()];
        let mut seen = HashSet::from([GroupElement::identity()]);
        let mut queue = VecDeque::from([GroupElement::identity()]);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = g.compose(spec, &x);
                if seen.insert(y) {
                    if elements.len() >= cap {
                        return Err(Error::Budget(format!("group closure exceeds {cap} elements")));
                    }
                    elements.push(y);
                    queue.push_back(y);
                }
            }
        }
        let generators = generators.iter().copied().filter(|g| !g.is_identity()).collect();
        Ok(Group {
            spec: spec.clone(),
            generators,
            elements,
        })
    }

    pub fn cyclic(spec: &FieldSpec, generator: GroupElement) -> Result<Group> {
        Group::closure(spec, &[generator], DEFAULT_CLOSURE_CAP)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }

    /// `alpha G alpha^{-1}`, generators conjugated alongside.
    pub fn conjugate(&self, alpha: &GroupElement) -> Group {
        let spec = &self.spec;
        Group {
            spec: spec.clone(),
            generators: self.generators.iter().map(|g| g.conjugate_by(spec, alpha)).collect(),
            elements: self.elements.iter().map(|g| g.conjugate_by(spec, alpha)).collect(),
        }
    }

    /// The group generated by the transposed generators.
    pub fn transposed(&self) -> Group {
        let generators: Vec<GroupElement> = self.generators.iter().map(|g| g.transposed()).collect();
        Group::closure(&self.spec, &generators, DEFAULT_CLOSURE_CAP.max(self.order()))
            .expect("transposition preserves the group order")
    }
}

pub fn conjugate_group(alpha: &GroupElement, group: &Group) -> Group {
    group.conjugate(alpha)
}

/// Orbits of a group on points and lines of a plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitData {
    /// Sorted point indices per orbit; orbits ordered by their smallest index.
    pub point_orbits: Vec<Vec<u32>>,
    pub line_orbits: Vec<Vec<u32>>,
    /// Smallest index of each orbit.
    pub point_rep: Vec<u32>,
    pub line_rep: Vec<u32>,
    /// Point-orbit lengths `w`.
    pub weights: Vec<u64>,
    /// Orbit number of each point.
    pub point_orbit_of: Vec<u32>,
    pub line_orbit_of: Vec<u32>,
}

impl OrbitData {
    /// Number of orbits (equal on points and lines).
    pub fn ell(&self) -> usize {
        self.point_orbits.len()
    }

    pub fn line_weights(&self) -> Vec<u64> {
        self.line_orbits.iter().map(|o| o.len() as u64).collect()
    }
}

fn partition(perms: &[Vec<u32>], n: usize) -> (Vec<Vec<u32>>, Vec<u32>) {
    const UNSEEN: u32 = u32::MAX;
    let mut orbit_of = vec![UNSEEN; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if orbit_of[start] != UNSEEN {
            continue;
        }
        let id = orbits.len() as u32;
        let mut orbit = vec![start as u32];
        orbit_of[start] = id;
        let mut head = 0;
        while head < orbit.len() {
            let x = orbit[head] as usize;
            head += 1;
            for perm in perms {
                let y = perm[x];
                if orbit_of[y as usize] == UNSEEN {
                    orbit_of[y as usize] = id;
                    orbit.push(y);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    (orbits, orbit_of)
}

pub fn orbits(plane: &Plane, group: &Group) -> Result<OrbitData> {
    if plane.spec() != group.spec() {
        return Err(Error::FieldMismatch(plane.spec().to_string(), group.spec().to_string()));
    }
    let n = plane.size();
    let point_perms: Vec<Vec<u32>> = group.generators().iter().map(|g| g.point_permutation(plane)).collect();
    let line_perms: Vec<Vec<u32>> = group.generators().iter().map(|g| g.line_permutation(plane)).collect();
    let (point_orbits, point_orbit_of) = partition(&point_perms, n);
    let (line_orbits, line_orbit_of) = partition(&line_perms, n);
    debug_assert_eq!(point_orbits.len(), line_orbits.len());
    Ok(OrbitData {
        point_rep: point_orbits.iter().map(|o| o[0]).collect(),
        line_rep: line_orbits.iter().map(|o| o[0]).collect(),
        weights: point_orbits.iter().map(|o| o.len() as u64).collect(),
        point_orbits,
        line_orbits,
        point_orbit_of,
        line_orbit_of,
    })
}

/// Parses generators in the group file format.
pub fn parse_generators(spec: &FieldSpec, text: &str) -> Result<Vec<GroupElement>> {
    parse_generator_lines(spec, text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

pub(crate) fn parse_generator_lines<'a>(
    spec: &FieldSpec,
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Vec<GroupElement>> {
    let mut gens = Vec::new();
    for (ln, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut codes = Vec::with_capacity(9);
        let mut frob = 0;
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            if let Some(k) = tok.strip_prefix("frob=") {
                frob = k.parse().map_err(|_| parse_err(ln, format!("bad Frobenius exponent `{k}`")))?;
            } else {
                codes.push(tok.parse::<u32>().map_err(|_| parse_err(ln, format!("bad element code `{tok}`")))?);
            }
        }
        if codes.len() != 9 {
            return Err(parse_err(ln, format!("expected 9 element codes, found {}", codes.len())));
        }
        let g = GroupElement::from_codes(spec, &codes, frob).map_err(|e| parse_err(ln, e.to_string()))?;
        gens.push(g);
    }
    Ok(gens)
}

pub fn format_generators(gens: &[GroupElement]) -> String {
    gens.iter().map(|g| format!("{g}\n")).collect()
}
