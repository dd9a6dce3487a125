//! Orbit condensation of the point/line incidence system.
//!
//! For a group `G` with `ell` orbits on points (and on lines), entry `a[i][j]` of the
//! condensed matrix counts the points of point orbit `j` on the representative line of
//! line orbit `i`. A 0/1 vector `x` with `A x <= r` selects a union of point orbits that
//! meets every line in at most `r` points; its size is `w . x` where `w` holds the
//! orbit lengths.
//!
//! File format:
//!
//! ```text
//! ell=<ell> q=<q> r=<r>
//! w: <w_1> ... <w_ell>
//! <ell rows of A, space separated>
//! ```
//!
//! Lines starting with `#` are comments.

use std::fmt;

use crate::error::{domain, parse_err, Error, Result};
use crate::geometry::Plane;
use crate::group::OrbitData;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondensedSystem {
    pub q: u32,
    pub r: u32,
    /// `ell x ell`, rows indexed by line orbits, columns by point orbits.
    pub a: Vec<Vec<u32>>,
    /// Point-orbit lengths.
    pub w: Vec<u64>,
    /// Line-orbit lengths; not part of the file format, so `None` after parsing.
    pub line_weights: Option<Vec<u64>>,
    pub provenance: String,
}

impl CondensedSystem {
    pub fn ell(&self) -> usize {
        self.w.len()
    }

    /// Total number of points covered by all orbits.
    pub fn total_weight(&self) -> u64 {
        self.w.iter().sum()
    }

    pub fn with_r(&self, r: u32) -> Result<CondensedSystem> {
        check_r(self.q, r)?;
        Ok(CondensedSystem { r, ..self.clone() })
    }

    pub fn parse(text: &str) -> Result<CondensedSystem> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty condensed-system file"))?;
        let (mut ell, mut q, mut r) = (None, None, None);
        for tok in header.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| parse_err(ln, format!("bad header token `{tok}`")))?;
            let v: u64 = v.parse().map_err(|_| parse_err(ln, format!("bad integer in `{tok}`")))?;
            match k {
                "ell" => ell = Some(v as usize),
                "q" => q = Some(v as u32),
                "r" => r = Some(v as u32),
                _ => return Err(parse_err(ln, format!("unknown header key `{k}`"))),
            }
        }
        let (ell, q, r) = match (ell, q, r) {
            (Some(ell), Some(q), Some(r)) => (ell, q, r),
            _ => return Err(parse_err(ln, "header must give ell, q and r")),
        };
        check_r(q, r).map_err(|e| parse_err(ln, e.to_string()))?;

        let (ln, wline) = lines.next().ok_or_else(|| parse_err(ln + 1, "missing `w:` line"))?;
        let wbody = wline.strip_prefix("w:").ok_or_else(|| parse_err(ln, "expected `w:`"))?;
        let w: Vec<u64> = wbody
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad weight `{t}`"))))
            .collect::<Result<_>>()?;
        if w.len() != ell {
            return Err(parse_err(ln, format!("expected {ell} weights, found {}", w.len())));
        }

        let mut a = Vec::with_capacity(ell);
        for (ln, row) in lines {
            let vals: Vec<u32> = row
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad entry `{t}`"))))
                .collect::<Result<_>>()?;
            if vals.len() != ell {
                return Err(parse_err(ln, format!("expected {ell} entries, found {}", vals.len())));
            }
            a.push(vals);
        }
        if a.len() != ell {
            return Err(parse_err(text.lines().count(), format!("expected {ell} rows, found {}", a.len())));
        }
        Ok(CondensedSystem {
            q,
            r,
            a,
            w,
            line_weights: None,
            provenance: String::from("file"),
        })
    }
}

impl fmt::Display for CondensedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.provenance.is_empty() {
            writeln!(f, "# {}", self.provenance)?;
        }
        writeln!(f, "ell={} q={} r={}", self.ell(), self.q, self.r)?;
        let w: Vec<String> = self.w.iter().map(|x| x.to_string()).collect();
        writeln!(f, "w: {}", w.join(" "))?;
        for row in &self.a {
            let vals: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", vals.join(" "))?;
        }
        Ok(())
    }
}

fn check_r(q: u32, r: u32) -> Result<()> {
    if r < 1 || r > q + 1 {
        return domain(format!("r = {r} outside [1, {}]", q + 1));
    }
    Ok(())
}

pub fn condense(plane: &Plane, orbits: &OrbitData, r: u32) -> Result<CondensedSystem> {
    check_r(plane.q(), r)?;
    let ell = orbits.ell();
    let mut a = vec![vec![0u32; ell]; ell];
    for (i, &line) in orbits.line_rep.iter().enumerate() {
        for &p in plane.points_on(line as usize) {
            a[i][orbits.point_orbit_of[p as usize] as usize] += 1;
        }
    }
    Ok(CondensedSystem {
        q: plane.q(),
        r,
        a,
        w: orbits.weights.clone(),
        line_weights: Some(orbits.line_weights()),
        provenance: format!("field {} orbits {}", plane.spec(), ell),
    })
}

/// `dual[j][i]`: lines of line orbit `i` through the representative point of point orbit `j`.
pub fn dual_condense(plane: &Plane, orbits: &OrbitData) -> Vec<Vec<u32>> {
    let ell = orbits.ell();
    let mut dual = vec![vec![0u32; ell]; ell];
    for (j, &p) in orbits.point_rep.iter().enumerate() {
        for &l in plane.lines_through(p as usize) {
            dual[j][orbits.line_orbit_of[l as usize] as usize] += 1;
        }
    }
    dual
}

/// Sorted point set formed by the selected orbits.
pub fn expand_solution(orbits: &OrbitData, x: &[bool]) -> Result<Vec<u32>> {
    if x.len() != orbits.ell() {
        return domain(format!("selection has length {}, expected {}", x.len(), orbits.ell()));
    }
    let mut pts: Vec<u32> = x
        .iter()
        .zip(&orbits.point_orbits)
        .filter(|(&sel, _)| sel)
        .flat_map(|(_, orbit)| orbit.iter().copied())
        .collect();
    pts.sort_unstable();
    Ok(pts)
}

/// Orbit selection vector of a point set that is an exact union of orbits.
pub fn compress_arc(orbits: &OrbitData, points: &[u32]) -> Result<Vec<bool>> {
    let mut hits = vec![0usize; orbits.ell()];
    for &p in points {
        let o = *orbits
            .point_orbit_of
            .get(p as usize)
            .ok_or_else(|| Error::Domain(format!("point index {p} out of range")))?;
        hits[o as usize] += 1;
    }
    let mut x = Vec::with_capacity(hits.len());
    for (j, &h) in hits.iter().enumerate() {
        let len = orbits.point_orbits[j].len();
        if h == len {
            x.push(true);
        } else if h == 0 {
            x.push(false);
        } else if h > len {
            return domain("point set contains duplicates");
        } else {
            return Err(Error::NotAdmitted { orbit: j });
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::group::{orbits, Group, GroupElement};

    fn setup(q: u32, gens: &[[u32; 9]]) -> (Plane, OrbitData) {
        let f = FieldSpec::from_order(q).unwrap();
        let plane = Plane::build(&f);
        let gens: Vec<GroupElement> = gens.iter().map(|c| GroupElement::from_codes(&f, c, 0).unwrap()).collect();
        let g = Group::closure(&f, &gens, 1000).unwrap();
        let orb = orbits(&plane, &g).unwrap();
        (plane, orb)
    }

    const S3: [[u32; 9]; 2] = [[0, 1, 0, 0, 0, 1, 1, 0, 0], [0, 1, 0, 1, 0, 0, 0, 0, 1]];

    #[test]
    fn trivial_group_reproduces_incidence_matrix() {
        let (plane, orb) = setup(3, &[]);
        let sys = condense(&plane, &orb, 2).unwrap();
        let m = plane.incidence_matrix();
        assert_eq!(sys.ell(), 13);
        assert!(sys.w.iter().all(|&w| w == 1));
        for i in 0..13 {
            for j in 0..13 {
                assert_eq!(sys.a[i][j], m.get(i, j) as u32);
            }
        }
    }

    #[test]
    fn rows_sum_to_q_plus_one_for_s3_over_gf16() {
        let (plane, orb) = setup(16, &S3);
        let sys = condense(&plane, &orb, 10).unwrap();
        for row in &sys.a {
            assert_eq!(row.iter().sum::<u32>(), 17);
        }
        for i in 0..sys.ell() {
            for j in 0..sys.ell() {
                assert!(sys.a[i][j] as u64 <= sys.w[j].min(17));
            }
        }
    }

    #[test]
    fn double_counting_against_dual() {
        let (plane, orb) = setup(7, &S3);
        let sys = condense(&plane, &orb, 3).unwrap();
        let dual = dual_condense(&plane, &orb);
        let lw = sys.line_weights.clone().unwrap();
        for i in 0..sys.ell() {
            for j in 0..sys.ell() {
                assert_eq!(lw[i] * sys.a[i][j] as u64, sys.w[j] * dual[j][i] as u64);
            }
        }
    }

    #[test]
    fn r_out_of_range() {
        let (plane, orb) = setup(3, &[]);
        assert!(condense(&plane, &orb, 0).is_err());
        assert!(condense(&plane, &orb, 5).is_err());
        assert!(condense(&plane, &orb, 4).is_ok());
    }

    #[test]
    fn expand_and_compress() {
        let (plane, orb) = setup(5, &S3);
        let ell = orb.ell();
        assert!(expand_solution(&orb, &vec![false; ell]).unwrap().is_empty());
        assert_eq!(expand_solution(&orb, &vec![true; ell]).unwrap().len(), plane.size());
        assert!(expand_solution(&orb, &[true]).is_err());
        assert_eq!(compress_arc(&orb, &[]).unwrap(), vec![false; ell]);

        let x: Vec<bool> = (0..ell).map(|j| j % 3 == 1).collect();
        let pts = expand_solution(&orb, &x).unwrap();
        assert_eq!(compress_arc(&orb, &pts).unwrap(), x);

        // split an orbit of length > 1
        let j = orb.point_orbits.iter().position(|o| o.len() > 1).unwrap();
        let partial = vec![orb.point_orbits[j][0]];
        assert!(matches!(compress_arc(&orb, &partial), Err(Error::NotAdmitted { orbit }) if orbit == j));
    }

    #[test]
    fn file_round_trip_and_errors() {
        let (plane, orb) = setup(4, &S3);
        let sys = condense(&plane, &orb, 2).unwrap();
        let parsed = CondensedSystem::parse(&sys.to_string()).unwrap();
        assert_eq!(parsed.a, sys.a);
        assert_eq!(parsed.w, sys.w);
        assert_eq!((parsed.q, parsed.r), (4, 2));
        assert!(CondensedSystem::parse("ell=2 q=2 r=9\nw: 1 1\n1 0\n0 1\n").is_err());
        assert!(CondensedSystem::parse("ell=2 q=2 r=1\nw: 1\n1 0\n0 1\n").is_err());
        assert!(matches!(
            CondensedSystem::parse("ell=2 q=2 r=1\nw: 1 1\n1 0\n"),
            Err(Error::Parse { .. })
        ));
    }
}
