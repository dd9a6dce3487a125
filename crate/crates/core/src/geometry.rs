//! The projective plane PG(2,q).
//!
//! Points and lines are both stored as normalized triples: the leftmost nonzero
//! coordinate is 1. A line is identified with its dual triple `h` and contains the
//! points `x` with `h . x = 0`. Both lists are enumerated in lexicographic order of
//! the element codes, so point `i` and line `i` carry the same triple.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, parse_err, Error, Result};
use crate::gf::{FieldElement, FieldSpec};

pub type Triple = [FieldElement; 3];

/// A 1-subspace of GF(q)^3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Triple);

/// A 2-subspace of GF(q)^3, given by its dual coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Line(pub Triple);

/// Scales `v` so its leftmost nonzero coordinate is 1. `None` for the zero vector.
pub fn normalize(spec: &FieldSpec, v: Triple) -> Option<Triple> {
    let lead = v.iter().copied().find(|c| !c.is_zero())?;
    if lead == FieldElement::ONE {
        return Some(v);
    }
    let s = spec.inv(lead).ok()?;
    Some(v.map(|c| spec.mul(s, c)))
}

pub fn dot(spec: &FieldSpec, a: &Triple, b: &Triple) -> FieldElement {
    let mut s = FieldElement::ZERO;
    for k in 0..3 {
        s = spec.add(s, spec.mul(a[k], b[k]));
    }
    s
}

impl Point {
    pub fn new(spec: &FieldSpec, coords: Triple) -> Result<Point> {
        for c in coords {
            spec.check(c)?;
        }
        normalize(spec, coords)
            .map(Point)
            .ok_or_else(|| Error::Domain("the zero vector is not a point".into()))
    }

    pub fn coords(&self) -> Triple {
        self.0
    }
}

impl Line {
    pub fn new(spec: &FieldSpec, dual: Triple) -> Result<Line> {
        Point::new(spec, dual).map(|p| Line(p.0))
    }

    pub fn dual(&self) -> Triple {
        self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.0[0], self.0[1], self.0[2])
    }
}

pub fn incident(spec: &FieldSpec, line: &Line, point: &Point) -> bool {
    dot(spec, &line.0, &point.0).is_zero()
}

/// Number of k-dimensional subspaces of GF(q)^n.
pub fn gaussian_number(n: u32, k: u32, q: u64) -> Result<u128> {
    if k > n {
        return domain(format!("k = {k} exceeds n = {n}"));
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num
            .checked_mul(q.pow(n) - q.pow(i))
            .ok_or_else(|| Error::Domain("Gaussian number overflows".into()))?;
        den = den
            .checked_mul(q.pow(k) - q.pow(i))
            .ok_or_else(|| Error::Domain("Gaussian number overflows".into()))?;
    }
    Ok(num / den)
}

struct PlaneData {
    spec: FieldSpec,
    points: Vec<Point>,
    lookup: Vec<u32>,
    on_line: Vec<Vec<u32>>,
    through_point: Vec<Vec<u32>>,
}

/// Enumerated PG(2,q) with incidence lists. Cheap to clone.
#[derive(Clone)]
pub struct Plane {
    d: Arc<PlaneData>,
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PG(2,{})", self.q())
    }
}

const NO_INDEX: u32 = u32::MAX;

impl Plane {
    pub fn build(spec: &FieldSpec) -> Plane {
        let q = spec.order() as usize;
        let mut points = Vec::with_capacity(q * q + q + 1);
        let mut lookup = vec![NO_INDEX; q * q * q];
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    let t = [a, b, c].map(|x| FieldElement(x as u16));
                    if normalize(spec, t) == Some(t) {
                        lookup[(a * q + b) * q + c] = points.len() as u32;
                        points.push(Point(t));
                    }
                }
            }
        }

        let mut data = PlaneData {
            spec: spec.clone(),
            points,
            lookup,
            on_line: Vec::new(),
            through_point: Vec::new(),
        };

        let n = data.points.len();
        let mut on_line = Vec::with_capacity(n);
        let mut through_point = vec![Vec::with_capacity(q + 1); n];
        for (li, h) in data.points.iter().enumerate() {
            let h = h.0;
            let basis = kernel_basis(spec, &h);
            let mut pts: Vec<u32> = Vec::with_capacity(q + 1);
            pts.push(data.index_of_raw(spec, basis[1]).unwrap());
            for t in spec.elements() {
                let v = [0, 1, 2].map(|i| spec.add(basis[0][i], spec.mul(t, basis[1][i])));
                pts.push(data.index_of_raw(spec, v).unwrap());
            }
            pts.sort_unstable();
            for &pi in &pts {
                through_point[pi as usize].push(li as u32);
            }
            on_line.push(pts);
        }
        data.on_line = on_line;
        data.through_point = through_point;
        Plane { d: Arc::new(data) }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.d.spec
    }

    pub fn q(&self) -> u32 {
        self.d.spec.order()
    }

    /// Number of points, which equals the number of lines.
    pub fn size(&self) -> usize {
        self.d.points.len()
    }

    pub fn point(&self, i: usize) -> Point {
        self.d.points[i]
    }

    pub fn line(&self, i: usize) -> Line {
        Line(self.d.points[i].0)
    }

    pub fn points(&self) -> &[Point] {
        &self.d.points
    }

    /// Index of the point spanned by `v` (normalized first).
    pub fn point_index(&self, v: Triple) -> Option<usize> {
        self.d.index_of_raw(&self.d.spec, v).map(|i| i as usize)
    }

    pub fn line_index(&self, dual: Triple) -> Option<usize> {
        self.point_index(dual)
    }

    /// Sorted indices of the points on line `i`.
    pub fn points_on(&self, line: usize) -> &[u32] {
        &self.d.on_line[line]
    }

    /// Sorted indices of the lines through point `j`.
    pub fn lines_through(&self, point: usize) -> &[u32] {
        &self.d.through_point[point]
    }

    pub fn is_incident(&self, line: usize, point: usize) -> bool {
        self.points_on(line).binary_search(&(point as u32)).is_ok()
    }

    /// The full line-by-point 0/1 incidence matrix.
    pub fn incidence_matrix(&self) -> ZeroOneMatrix {
        let n = self.size();
        let mut m = ZeroOneMatrix::zeros(n, n);
        for i in 0..n {
            for &j in self.points_on(i) {
                m.set(i, j as usize, 1);
            }
        }
        m
    }
}

impl PlaneData {
    fn index_of_raw(&self, spec: &FieldSpec, v: Triple) -> Option<u32> {
        let q = spec.order() as usize;
        if v.iter().any(|c| c.code() as usize >= q) {
            return None;
        }
        let t = normalize(spec, v)?;
        let code = (t[0].0 as usize * q + t[1].0 as usize) * q + t[2].0 as usize;
        match self.lookup[code] {
            NO_INDEX => None,
            i => Some(i),
        }
    }
}

/// Basis of `{x : h . x = 0}` for a normalized `h`: its pivot coordinate is 1, the
/// other two coordinates are free.
fn kernel_basis(spec: &FieldSpec, h: &Triple) -> [Triple; 2] {
    let pivot = h.iter().position(|c| !c.is_zero()).unwrap();
    let mut free = (0..3).filter(|&i| i != pivot);
    let mut make = || {
        let i = free.next().unwrap();
        let mut v = [FieldElement::ZERO; 3];
        v[i] = FieldElement::ONE;
        v[pivot] = spec.neg(h[i]);
        v
    };
    [make(), make()]
}

/// Dense 0/1 matrix with the text dump format `<rows> <cols>` followed by one row per line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroOneMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl ZeroOneMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZeroOneMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = ZeroOneMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty matrix file"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln + 1, "bad dimension")))
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(parse_err(ln + 1, "expected `<rows> <cols>`"));
        }
        let mut m = ZeroOneMatrix::zeros(dims[0], dims[1]);
        let mut r = 0;
        for (ln, line) in lines {
            if r >= m.rows {
                return Err(parse_err(ln + 1, "too many rows"));
            }
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != m.cols {
                return Err(parse_err(ln + 1, format!("expected {} entries", m.cols)));
            }
            for (j, v) in vals.iter().enumerate() {
                match *v {
                    "0" => {}
                    "1" => m.set(r, j, 1),
                    _ => return Err(parse_err(ln + 1, format!("entry `{v}` is not 0/1"))),
                }
            }
            r += 1;
        }
        if r != m.rows {
            return Err(parse_err(text.lines().count(), "too few rows"));
        }
        Ok(m)
    }
}

impl fmt::Display for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<&str> = self.row(i).iter().map(|&v| if v == 1 { "1" } else { "0" }).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(c: u16) -> FieldElement {
        FieldElement(c)
    }

    #[test]
    fn gaussian_numbers() {
        assert_eq!(gaussian_number(3, 1, 5).unwrap(), 31);
        assert_eq!(gaussian_number(3, 2, 5).unwrap(), 31);
        assert_eq!(gaussian_number(7, 0, 3).unwrap(), 1);
        assert_eq!(gaussian_number(4, 2, 2).unwrap(), 35);
        assert!(gaussian_number(2, 3, 2).is_err());
    }

    #[test]
    fn two_subspaces_of_gf2_4_by_enumeration() {
        // a 2-subspace is determined by its 3 nonzero vectors {u, v, u^v}
        let mut subspaces = std::collections::BTreeSet::new();
        for u in 1u8..16 {
            for v in 1u8..16 {
                if u != v {
                    let mut s = [u, v, u ^ v];
                    s.sort();
                    subspaces.insert(s);
                }
            }
        }
        assert_eq!(subspaces.len(), 35);
    }

    #[test]
    fn fano_plane() {
        let plane = Plane::build(&FieldSpec::prime(2).unwrap());
        assert_eq!(plane.size(), 7);
        for i in 0..7 {
            assert_eq!(plane.points_on(i).len(), 3);
            assert_eq!(plane.lines_through(i).len(), 3);
        }
        let m = plane.incidence_matrix();
        assert!((0..7).all(|i| m.row(i).iter().map(|&v| v as u32).sum::<u32>() == 3));
    }

    #[test]
    fn basic_incidence() {
        let f = FieldSpec::prime(3).unwrap();
        let l = Line([fe(1), fe(0), fe(0)]);
        assert!(incident(&f, &l, &Point([fe(0), fe(0), fe(1)])));
        assert!(!incident(&f, &l, &Point([fe(1), fe(0), fe(0)])));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let plane = Plane::build(&FieldSpec::prime(3).unwrap());
        let pts = plane.points();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pts[0], Point([fe(0), fe(0), fe(1)]));
        assert_eq!(pts[12], Point([fe(1), fe(2), fe(2)]));
    }

    #[test]
    fn pairs_of_points_span_one_line_q4() {
        let plane = Plane::build(&FieldSpec::from_order(4).unwrap());
        let n = plane.size();
        for a in 0..n {
            for b in a + 1..n {
                let common = plane
                    .lines_through(a)
                    .iter()
                    .filter(|l| plane.lines_through(b).contains(l))
                    .count();
                assert_eq!(common, 1);
            }
        }
    }

    #[test]
    fn incidence_matrix_matches_dot_products_q5() {
        let f = FieldSpec::prime(5).unwrap();
        let plane = Plane::build(&f);
        let m = plane.incidence_matrix();
        for i in 0..plane.size() {
            for j in 0..plane.size() {
                let expected = incident(&f, &plane.line(i), &plane.point(j)) as u8;
                assert_eq!(m.get(i, j), expected);
            }
        }
    }

    #[test]
    fn q16_row_sums() {
        let f = FieldSpec::from_order(16).unwrap();
        let plane = Plane::build(&f);
        for i in 0..plane.size() {
            let cnt = plane.points().iter().filter(|p| incident(&f, &plane.line(i), p)).count();
            assert_eq!(cnt, 17);
        }
    }

    #[test]
    fn matrix_dump_parses_back() {
        let plane = Plane::build(&FieldSpec::prime(2).unwrap());
        let m = plane.incidence_matrix();
        let text = m.to_string();
        assert!(text.starts_with("7 7\n"));
        assert_eq!(ZeroOneMatrix::parse(&text).unwrap(), m);
        assert!(ZeroOneMatrix::parse("2 2\n0 1\n").is_err());
        assert!(ZeroOneMatrix::parse("1 2\n0 2\n").is_err());
    }

    #[test]
    fn zero_vector_is_not_a_point() {
        let f = FieldSpec::prime(3).unwrap();
        assert!(Point::new(&f, [fe(0); 3]).is_err());
        assert!(Point::new(&f, [fe(0), fe(3), fe(1)]).is_err());
        assert_eq!(Point::new(&f, [fe(2), fe(1), fe(0)]).unwrap(), Point([fe(1), fe(2), fe(0)]));
    }
}
