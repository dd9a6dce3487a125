//! Arcs: verification, group admission, isomorphic images, the linear-code view, the arc
//! file format, and the bundled reference arcs.
//!
//! Arc file format:
//!
//! ```text
//! q=25
//! p=5
//! e=2
//! poly=2,1,1          (omitted for prime fields)
//! r=3
//! group-begin         (optional block in the group file format)
//! 0 10 13 13 3 5 18 18 4
//! group-end
//! points:
//! (0,1,12) (1,5,2) ...
//! ```
//!
//! Lines starting with `#` are comments. Field elements use the integer encoding
//! `a_0 + a_1 p + ... + a_{e-1} p^{e-1}`.

use std::fmt;

use serde::Serialize;

use crate::error::{domain, parse_err, Error, Result};
use crate::geometry::{dot, Plane, Triple};
use crate::gf::{FieldElement, FieldSpec};
use crate::group::{parse_generator_lines, ActionConvention, Group, GroupElement, DEFAULT_CLOSURE_CAP};

/// A set of points of a plane, with the multiplicity bound it claims to satisfy.
#[derive(Clone, Debug)]
pub struct Arc {
    plane: Plane,
    points: Vec<u32>,
    r_claimed: Option<u32>,
}

impl Arc {
    /// Sorts the indices; rejects out-of-range and repeated points.
    pub fn new(plane: &Plane, mut points: Vec<u32>, r_claimed: Option<u32>) -> Result<Arc> {
        points.sort_unstable();
        if let Some(&p) = points.last() {
            if p as usize >= plane.size() {
                return domain(format!("point index {p} out of range"));
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return domain(format!("point {} listed twice", plane.point(w[0] as usize)));
        }
        Ok(Arc {
            plane: plane.clone(),
            points,
            r_claimed,
        })
    }

    pub fn from_triples(plane: &Plane, triples: &[Triple], r_claimed: Option<u32>) -> Result<Arc> {
        let pts = triples
            .iter()
            .map(|t| {
                plane
                    .point_index(*t)
                    .map(|i| i as u32)
                    .ok_or_else(|| Error::Domain(format!("({},{},{}) is not a point", t[0], t[1], t[2])))
            })
            .collect::<Result<Vec<u32>>>()?;
        Arc::new(plane, pts, r_claimed)
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn points(&self) -> &[u32] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn r_claimed(&self) -> Option<u32> {
        self.r_claimed
    }

    pub fn with_r_claimed(&self, r: Option<u32>) -> Arc {
        Arc {
            r_claimed: r,
            ..self.clone()
        }
    }

    fn membership(&self) -> Vec<bool> {
        let mut inside = vec![false; self.plane.size()];
        for &p in &self.points {
            inside[p as usize] = true;
        }
        inside
    }

    /// Number of arc points on each line.
    pub fn line_multiplicities(&self) -> Vec<u32> {
        let inside = self.membership();
        (0..self.plane.size())
            .map(|l| self.plane.points_on(l).iter().filter(|&&p| inside[p as usize]).count() as u32)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcReport {
    pub n: usize,
    /// Observed `r`.
    pub max_multiplicity: u32,
    pub lines_at_max: usize,
    pub is_arc_for_claimed_r: bool,
    pub group_admitted: Option<bool>,
}

impl ArcReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Whether the claimed bound holds and the group, if checked, was admitted.
    pub fn ok(&self) -> bool {
        self.is_arc_for_claimed_r && self.group_admitted != Some(false)
    }
}

impl fmt::Display for ArcReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "max_multiplicity={}", self.max_multiplicity)?;
        writeln!(f, "lines_at_max={}", self.lines_at_max)?;
        writeln!(f, "is_arc_for_claimed_r={}", self.is_arc_for_claimed_r)?;
        match self.group_admitted {
            Some(a) => writeln!(f, "group_admitted={a}"),
            None => writeln!(f, "group_admitted=none"),
        }
    }
}

/// Line multiplicities of the arc. Without a claimed `r` the arc is reported as an
/// `(n, r')`-arc for its observed `r'`, so `is_arc_for_claimed_r` is true.
pub fn verify_arc(arc: &Arc) -> Result<ArcReport> {
    if arc.points.is_empty() {
        return domain("cannot verify an empty point set");
    }
    let mult = arc.line_multiplicities();
    let max = mult.iter().copied().max().unwrap_or(0);
    Ok(ArcReport {
        n: arc.n(),
        max_multiplicity: max,
        lines_at_max: mult.iter().filter(|&&m| m == max).count(),
        is_arc_for_claimed_r: arc.r_claimed.map_or(true, |r| r == max),
        group_admitted: None,
    })
}

/// True iff every generator maps the point set onto itself.
pub fn admits_group(arc: &Arc, group: &Group) -> Result<bool> {
    if arc.plane.spec() != group.spec() {
        return Err(Error::FieldMismatch(arc.plane.spec().to_string(), group.spec().to_string()));
    }
    let inside = arc.membership();
    Ok(group.generators().iter().all(|g| {
        let perm = g.point_permutation(&arc.plane);
        arc.points.iter().all(|&p| inside[perm[p as usize] as usize])
    }))
}

/// Checks admission under the column action, then under the transposed action. Returns
/// the group in the convention that worked (column if neither did) and whether it did.
pub fn admits_with_convention(arc: &Arc, group: Group) -> Result<(Group, ActionConvention, bool)> {
    if admits_group(arc, &group)? {
        return Ok((group, ActionConvention::Column, true));
    }
    let t = group.transposed();
    if admits_group(arc, &t)? {
        return Ok((t, ActionConvention::Transpose, true));
    }
    Ok((group, ActionConvention::Column, false))
}

/// The image `alpha B`.
pub fn map_arc(alpha: &GroupElement, arc: &Arc) -> Arc {
    let perm = alpha.point_permutation(&arc.plane);
    let mut points: Vec<u32> = arc.points.iter().map(|&p| perm[p as usize]).collect();
    points.sort_unstable();
    Arc {
        plane: arc.plane.clone(),
        points,
        r_claimed: arc.r_claimed,
    }
}

/// A `3 x n` matrix over GF(q), stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    pub columns: Vec<Triple>,
}

impl GeneratorMatrix {
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn rank(&self, spec: &FieldSpec) -> usize {
        let mut rows: Vec<Vec<FieldElement>> = (0..3).map(|r| self.columns.iter().map(|c| c[r]).collect()).collect();
        let mut rank = 0;
        for col in 0..self.n() {
            let Some(piv) = (rank..3).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, piv);
            let inv = spec.inv(rows[rank][col]).expect("pivot is nonzero");
            for r in 0..3 {
                if r != rank && !rows[r][col].is_zero() {
                    let factor = spec.mul(rows[r][col], inv);
                    for c in col..self.n() {
                        let v = spec.mul(factor, rows[rank][c]);
                        rows[r][c] = spec.sub(rows[r][c], v);
                    }
                }
            }
            rank += 1;
            if rank == 3 {
                break;
            }
        }
        rank
    }
}

impl fmt::Display for GeneratorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..3 {
            let row: Vec<String> = self.columns.iter().map(|c| c[r].to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Columns are the normalized point coordinates in index order.
pub fn to_generator_matrix(arc: &Arc) -> Result<GeneratorMatrix> {
    if arc.points.is_empty() {
        return domain("empty arc has no generator matrix");
    }
    Ok(GeneratorMatrix {
        columns: arc.points.iter().map(|&p| arc.plane.point(p as usize).coords()).collect(),
    })
}

/// Minimum Hamming weight over all `q^3 - 1` nonzero codewords.
pub fn min_distance(spec: &FieldSpec, gen: &GeneratorMatrix) -> Result<usize> {
    for c in &gen.columns {
        for &a in c {
            spec.check(a)?;
        }
    }
    let rank = gen.rank(spec);
    if rank < 3 {
        return domain(format!("generator matrix has rank {rank}, expected 3"));
    }
    let elems: Vec<FieldElement> = spec.elements().collect();
    let mut best = usize::MAX;
    for &a in &elems {
        for &b in &elems {
            for &c in &elems {
                let m = [a, b, c];
                if m.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let wt = gen.columns.iter().filter(|col| !dot(spec, &m, col).is_zero()).count();
                best = best.min(wt);
            }
        }
    }
    Ok(best)
}

/// Contents of an arc file.
#[derive(Clone, Debug)]
pub struct ArcFile {
    pub spec: FieldSpec,
    pub plane: Plane,
    pub arc: Arc,
    /// Closure of the listed generators, expressed in the convention that worked.
    pub group: Option<Group>,
    /// The action convention under which the group stabilizes the arc (column if neither does).
    pub convention: ActionConvention,
    pub comments: Vec<String>,
}

fn parse_triple(spec: &FieldSpec, tok: &str, ln: usize) -> Result<Triple> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| parse_err(ln, format!("malformed tuple `{tok}`")))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(parse_err(ln, format!("tuple `{tok}` must have three entries")));
    }
    let mut t = [FieldElement::ZERO; 3];
    for (slot, s) in t.iter_mut().zip(parts) {
        let code: u32 = s.parse().map_err(|_| parse_err(ln, format!("bad element `{s}` in `{tok}`")))?;
        *slot = spec.element(code).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    if t.iter().all(|x| x.is_zero()) {
        return Err(parse_err(ln, format!("`{tok}` is the zero vector, not a point")));
    }
    Ok(t)
}

fn header_value(ln: usize, key: &str, v: &str) -> Result<u32> {
    v.trim().parse().map_err(|_| parse_err(ln, format!("bad value for `{key}`: `{v}`")))
}

pub fn parse_arc_file(text: &str) -> Result<ArcFile> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).collect();
    let mut comments = Vec::new();
    let (mut q, mut p, mut e, mut r) = (None, None, None, None);
    let mut poly: Option<(usize, Vec<u32>)> = None;
    let mut idx = 0;

    // header
    while idx < lines.len() {
        let (ln, line) = lines[idx];
        if line.is_empty() {
            idx += 1;
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            idx += 1;
            continue;
        }
        if line == "group-begin" || line.starts_with("points:") {
            break;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(ln, format!("expected `key=value`, found `{line}`")))?;
        match k.trim() {
            "q" => q = Some(header_value(ln, k, v)?),
            "p" => p = Some(header_value(ln, k, v)?),
            "e" => e = Some(header_value(ln, k, v)?),
            "r" => r = Some(header_value(ln, k, v)?),
            "poly" => {
                let coeffs = v
                    .split(',')
                    .map(|c| c.trim().parse().map_err(|_| parse_err(ln, format!("bad coefficient `{c}`"))))
                    .collect::<Result<Vec<u32>>>()?;
                poly = Some((ln, coeffs));
            }
            other => return Err(parse_err(ln, format!("unknown header key `{other}`"))),
        }
        idx += 1;
    }
    let last = lines.last().map_or(1, |l| l.0);
    let (q, p, e, r) = match (q, p, e, r) {
        (Some(q), Some(p), Some(e), Some(r)) => (q, p, e, r),
        _ => return Err(parse_err(last.min(idx + 1), "header must give q, p, e and r")),
    };
    if (p as u64).checked_pow(e) != Some(q as u64) {
        return Err(parse_err(1, format!("q = {q} is not p^e = {p}^{e}")));
    }
    let spec = match (e, poly) {
        (1, None) => FieldSpec::prime(p).map_err(|err| parse_err(1, err.to_string()))?,
        (1, Some((ln, _))) => return Err(parse_err(ln, "poly must be omitted for a prime field")),
        (_, None) => return Err(parse_err(1, format!("poly required for GF({p}^{e})"))),
        (_, Some((ln, coeffs))) => FieldSpec::new(p, e, &coeffs).map_err(|err| parse_err(ln, err.to_string()))?,
    };
    if r < 1 || r > q + 1 {
        return Err(parse_err(1, format!("r = {r} outside [1, {}]", q + 1)));
    }

    // optional group block
    let mut generators = None;
    if idx < lines.len() && lines[idx].1 == "group-begin" {
        let start = idx + 1;
        let end = (start..lines.len())
            .find(|&k| lines[k].1 == "group-end")
            .ok_or_else(|| parse_err(lines[idx].0, "group-begin without group-end"))?;
        generators = Some(parse_generator_lines(&spec, lines[start..end].iter().copied())?);
        idx = end + 1;
    }

    // points
    while idx < lines.len() && (lines[idx].1.is_empty() || lines[idx].1.starts_with('#')) {
        idx += 1;
    }
    let (pln, pline) = lines.get(idx).copied().ok_or_else(|| parse_err(last, "missing `points:` section"))?;
    let first = pline
        .strip_prefix("points:")
        .ok_or_else(|| parse_err(pln, format!("expected `points:`, found `{pline}`")))?;
    let plane = Plane::build(&spec);
    let mut seen = vec![false; plane.size()];
    let mut points = Vec::new();
    let rest = lines[idx + 1..].iter().copied();
    for (ln, line) in std::iter::once((pln, first)).chain(rest) {
        if line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            let t = parse_triple(&spec, tok, ln)?;
            let pi = plane.point_index(t).expect("nonzero triple is a point");
            if std::mem::replace(&mut seen[pi], true) {
                return Err(parse_err(ln, format!("duplicate point {tok}")));
            }
            points.push(pi as u32);
        }
    }
    let arc = Arc::new(&plane, points, Some(r))?;

    let (group, convention) = match generators {
        None => (None, ActionConvention::Column),
        Some(gens) => {
            let g = Group::closure(&spec, &gens, DEFAULT_CLOSURE_CAP)?;
            let (g, conv, _) = admits_with_convention(&arc, g)?;
            (Some(g), conv)
        }
    };
    Ok(ArcFile {
        spec,
        plane,
        arc,
        group,
        convention,
        comments,
    })
}

/// Writes an arc in the arc file format, seven tuples per line.
pub fn format_arc_file(spec: &FieldSpec, arc: &Arc, r: u32, generators: Option<&[GroupElement]>) -> String {
    let mut out = String::new();
    out.push_str(&format!("q={}\np={}\ne={}\n", spec.order(), spec.p(), spec.e()));
    if spec.e() > 1 {
        let poly: Vec<String> = spec.poly().iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("poly={}\n", poly.join(",")));
    }
    out.push_str(&format!("r={r}\n"));
    if let Some(gens) = generators {
        out.push_str("group-begin\n");
        for g in gens {
            out.push_str(&format!("{g}\n"));
        }
        out.push_str("group-end\n");
    }
    out.push_str("points:\n");
    for chunk in arc.points.chunks(7) {
        let toks: Vec<String> = chunk.iter().map(|&p| arc.plane.point(p as usize).to_string()).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

/// A bundled reference arc.
#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub q: u32,
    pub r: u32,
    pub n: usize,
    pub text: &'static str,
}

impl CorpusEntry {
    pub fn load(&self) -> Result<ArcFile> {
        parse_arc_file(self.text)
    }
}

macro_rules! corpus_entry {
    ($name:literal, $q:literal, $r:literal, $n:literal) => {
        CorpusEntry {
            name: $name,
            q: $q,
            r: $r,
            n: $n,
            text: include_str!(concat!("../data/corpus/", $name, ".arc")),
        }
    };
}

static CORPUS: [CorpusEntry; 7] = [
    corpus_entry!("q16_r10_n144", 16, 10, 144),
    corpus_entry!("q25_r3_n39", 25, 3, 39),
    corpus_entry!("q25_r18_n418", 25, 18, 418),
    corpus_entry!("q27_r9_n201", 27, 9, 201),
    corpus_entry!("q29_r14_n364", 29, 14, 364),
    corpus_entry!("q29_r25_n697", 29, 25, 697),
    corpus_entry!("q31_r25_n734", 31, 25, 734),
];

/// The seven reference arcs.
pub fn corpus() -> &'static [CorpusEntry] {
    &CORPUS
}

pub fn corpus_entry(q: u32, r: u32) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|c| c.q == q && c.r == r)
}

/// Improved lower bound: previously known `old`, new `new`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub q: u32,
    pub r: u32,
    pub old: u64,
    pub new: u64,
}

/// Open case: `lower <= m_r(2,q) <= upper`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OpenRow {
    pub q: u32,
    pub r: u32,
    pub lower: u64,
    pub upper: u64,
}

fn data_rows(text: &str) -> impl Iterator<Item = [u64; 4]> + '_ {
    text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).map(|l| {
        let v: Vec<u64> = l.split_whitespace().map(|t| t.parse().expect("bundled table is numeric")).collect();
        [v[0], v[1], v[2], v[3]]
    })
}

/// Improved lower bounds realized by the reference arcs.
pub fn improved_bounds() -> Vec<BoundRow> {
    data_rows(include_str!("../data/table1.txt"))
        .map(|[q, r, old, new]| BoundRow {
            q: q as u32,
            r: r as u32,
            old,
            new,
        })
        .collect()
}

/// Parameters still open after the exclusion results.
pub fn open_cases() -> Vec<OpenRow> {
    data_rows(include_str!("../data/table2.txt"))
        .map(|[q, r, lower, upper]| OpenRow {
            q: q as u32,
            r: r as u32,
            lower,
            upper,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_plane_has_full_lines() {
        let plane = Plane::build(&FieldSpec::prime(5).unwrap());
        let arc = Arc::new(&plane, (0..31).collect(), None).unwrap();
        let rep = verify_arc(&arc).unwrap();
        assert_eq!((rep.n, rep.max_multiplicity, rep.lines_at_max), (31, 6, 31));
    }

    #[test]
    fn empty_arc_is_an_error() {
        let plane = Plane::build(&FieldSpec::prime(3).unwrap());
        let arc = Arc::new(&plane, vec![], None).unwrap();
        assert!(verify_arc(&arc).is_err());
        assert!(to_generator_matrix(&arc).is_err());
    }

    #[test]
    fn duplicates_rejected() {
        let plane = Plane::build(&FieldSpec::prime(3).unwrap());
        assert!(Arc::new(&plane, vec![1, 2, 1], None).is_err());
        assert!(Arc::new(&plane, vec![13], None).is_err());
    }

    #[test]
    fn single_point_generator_and_full_plane_code() {
        let f = FieldSpec::prime(2).unwrap();
        let plane = Plane::build(&f);
        let one = Arc::from_triples(&plane, &[[FieldElement(1), FieldElement(0), FieldElement(0)]], None).unwrap();
        assert_eq!(to_generator_matrix(&one).unwrap().n(), 1);
        assert!(min_distance(&f, &to_generator_matrix(&one).unwrap()).is_err());
        let all = Arc::new(&plane, (0..7).collect(), None).unwrap();
        assert_eq!(min_distance(&f, &to_generator_matrix(&all).unwrap()).unwrap(), 4);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dup = "q=3\np=3\ne=1\nr=2\npoints:\n(1,0,0) (0,1,0)\n(1,0,0)\n";
        assert!(matches!(parse_arc_file(dup), Err(Error::Parse { line: 7, .. })));
        let zero = "q=3\np=3\ne=1\nr=2\npoints:\n(0,0,0)\n";
        assert!(matches!(parse_arc_file(zero), Err(Error::Parse { line: 6, .. })));
        let bad = "q=3\np=3\ne=1\nr=2\npoints:\n(1,0\n";
        assert!(matches!(parse_arc_file(bad), Err(Error::Parse { line: 6, .. })));
        let reducible = "q=4\np=2\ne=2\npoly=1,0,1\nr=2\npoints:\n(1,0,0)\n";
        assert!(matches!(parse_arc_file(reducible), Err(Error::Parse { line: 4, .. })));
        let range = "q=3\np=3\ne=1\nr=2\npoints:\n(1,3,0)\n";
        assert!(parse_arc_file(range).is_err());
    }

    #[test]
    fn file_round_trip() {
        let entry = corpus_entry(25, 3).unwrap();
        let file = entry.load().unwrap();
        assert_eq!(file.arc.n(), 39);
        let gens: Vec<GroupElement> = file.group.as_ref().unwrap().generators().to_vec();
        let text = format_arc_file(&file.spec, &file.arc, 3, Some(&gens));
        let again = parse_arc_file(&text).unwrap();
        assert_eq!(again.arc.points(), file.arc.points());
        assert_eq!(again.spec, file.spec);
    }

    #[test]
    fn tables_are_consistent_with_corpus() {
        let t1 = improved_bounds();
        assert_eq!(t1.len(), corpus().len());
        for row in &t1 {
            let c = corpus_entry(row.q, row.r).unwrap();
            assert_eq!(c.n as u64, row.new);
            assert!(row.new > row.old);
        }
        assert_eq!(open_cases().len(), 8);
    }
}
