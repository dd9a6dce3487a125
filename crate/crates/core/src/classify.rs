//! Conjugacy classes of PGL(3,p) and the exclusion sweep over cyclic subgroups.
//!
//! For 3x3 matrices the pair (characteristic polynomial, minimal polynomial) determines
//! the GL(3,p) conjugacy class, so it serves as the canonical label. A PGL class is
//! labelled by the least label over all scalar multiples. Two elements generate conjugate
//! cyclic subgroups iff their projective orders agree and one is conjugate to a coprime
//! power of the other; the set of PGL labels of all coprime powers (the signature)
//! therefore identifies the subgroup class.
//!
//! Checkpoint files are JSON objects
//! `{"p":..,"r":..,"n":..,"outcomes":{"<subgroup>":{..outcome..},..}}`, rewritten after
//! every finished subgroup.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::condense::condense;
use crate::error::{domain, Error, Result};
use crate::geometry::Plane;
use crate::gf::{is_prime, FieldElement, FieldSpec};
use crate::group::{orbits, Group, GroupElement};
use crate::matrix::Mat3;
use crate::solver::{solve_feasible, IlpModel, SolveOptions, Status, EXCLUSION_BUDGET};

/// Largest prime supported by the class enumeration.
pub const MAX_CLASS_PRIME: u32 = 31;

/// GL(3,q) conjugacy invariant: monic characteristic and minimal polynomials, given by the
/// codes of their non-leading coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassLabel {
    pub charpoly: [u32; 3],
    pub minpoly: Vec<u32>,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mp: Vec<String> = self.minpoly.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "cp={},{},{} mp={}",
            self.charpoly[0],
            self.charpoly[1],
            self.charpoly[2],
            mp.join(",")
        )
    }
}

/// Coefficients `(alpha, beta)` with `m^2 = alpha m + beta I`, if they exist.
fn quadratic_relation(spec: &FieldSpec, m: &Mat3) -> Option<(FieldElement, FieldElement)> {
    let m2 = m.mul(spec, m);
    let alpha = match (0..9).find(|&k| k % 4 != 0 && !m.0[k].is_zero()) {
        Some(k) => spec.div(m2.0[k], m.0[k]).ok()?,
        None => {
            // diagonal: two distinct diagonal entries determine alpha
            let (i, j) = [(0, 4), (0, 8), (4, 8)].into_iter().find(|&(i, j)| m.0[i] != m.0[j])?;
            spec.div(spec.sub(m2.0[i], m2.0[j]), spec.sub(m.0[i], m.0[j])).ok()?
        }
    };
    let beta = spec.sub(m2.0[0], spec.mul(alpha, m.0[0]));
    let rhs = m.scale(spec, alpha).add(spec, &Mat3::scalar(beta));
    (rhs == m2).then_some((alpha, beta))
}

/// Label equal for two invertible matrices iff they are GL(3,q)-conjugate.
pub fn canonical_label(spec: &FieldSpec, m: &Mat3) -> Result<ClassLabel> {
    for &c in &m.0 {
        spec.check(c)?;
    }
    let det = m.det(spec);
    if det.is_zero() {
        return domain(format!("matrix [{m}] is singular"));
    }
    // x^3 - tr x^2 + s2 x - det
    let charpoly = [spec.neg(det).code(), m.second_invariant(spec).code(), spec.neg(m.trace(spec)).code()];
    let minpoly = if let Some(s) = m.as_scalar() {
        vec![spec.neg(s).code()]
    } else if let Some((alpha, beta)) = quadratic_relation(spec, m) {
        vec![spec.neg(beta).code(), spec.neg(alpha).code()]
    } else {
        charpoly.to_vec()
    };
    Ok(ClassLabel { charpoly, minpoly })
}

/// Least label over all nonzero scalar multiples: a PGL(3,q) class invariant.
pub fn projective_label(spec: &FieldSpec, m: &Mat3) -> Result<ClassLabel> {
    let mut best: Option<ClassLabel> = None;
    for s in spec.nonzero_elements() {
        let l = canonical_label(spec, &m.scale(spec, s))?;
        if best.as_ref().map_or(true, |b| l < *b) {
            best = Some(l);
        }
    }
    Ok(best.expect("field has a nonzero element"))
}

fn check_prime(p: u32) -> Result<FieldSpec> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if p > MAX_CLASS_PRIME {
        return Err(Error::Budget(format!("class enumeration supports p <= {MAX_CLASS_PRIME}, got {p}")));
    }
    FieldSpec::prime(p)
}

fn el(spec: &FieldSpec, n: i64) -> FieldElement {
    spec.from_int(n)
}

/// Companion matrix of `x^3 + c2 x^2 + c1 x + c0`.
fn companion3(spec: &FieldSpec, c0: FieldElement, c1: FieldElement, c2: FieldElement) -> Mat3 {
    let (z, o) = (FieldElement::ZERO, FieldElement::ONE);
    Mat3([z, z, spec.neg(c0), o, z, spec.neg(c1), z, o, spec.neg(c2)])
}

/// One representative per GL(3,p) conjugacy class, as rational canonical forms:
/// companion matrices of all cubics with nonzero constant term (minimal polynomial of
/// degree 3), `[a] + companion((x-a)(x-b))` (degree 2), and the scalars (degree 1).
pub fn gl3_class_representatives(p: u32) -> Result<Vec<Mat3>> {
    let spec = check_prime(p)?;
    let p = p as i64;
    let mut reps = Vec::with_capacity((p * p * p - p) as usize);
    for c0 in 1..p {
        for c1 in 0..p {
            for c2 in 0..p {
                reps.push(companion3(&spec, el(&spec, c0), el(&spec, c1), el(&spec, c2)));
            }
        }
    }
    let z = FieldElement::ZERO;
    for a in 1..p {
        for b in 1..p {
            // (x-a)(x-b) = x^2 - (a+b) x + ab, companion [[0, -ab], [1, a+b]]
            let (a_, s, prod) = (el(&spec, a), el(&spec, a + b), el(&spec, a * b));
            reps.push(Mat3([a_, z, z, z, z, spec.neg(prod), z, FieldElement::ONE, s]));
        }
    }
    for a in 1..p {
        reps.push(Mat3::scalar(el(&spec, a)));
    }
    Ok(reps)
}

/// Least `m >= 1` with `g^m` scalar.
pub fn projective_order(spec: &FieldSpec, m: &Mat3) -> u64 {
    let mut pow = *m;
    let mut k = 1;
    while pow.as_scalar().is_none() {
        pow = pow.mul(spec, m);
        k += 1;
    }
    k
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Sorted set of projective labels of `g^k` for `k` coprime to the projective order.
pub fn subgroup_signature(spec: &FieldSpec, m: &Mat3) -> Result<Vec<ClassLabel>> {
    let order = projective_order(spec, m);
    let mut labels = Vec::new();
    let mut pow = *m;
    for k in 1..=order.max(1) {
        if gcd(k, order) == 1 {
            labels.push(projective_label(spec, &pow)?);
        }
        pow = pow.mul(spec, m);
    }
    labels.sort();
    labels.dedup();
    Ok(labels)
}

/// A representative of one PGL(3,p) conjugacy class of elements.
#[derive(Clone, Debug, Serialize)]
pub struct ConjClassRep {
    /// Position in the enumeration.
    pub id: usize,
    #[serde(serialize_with = "ser_element")]
    pub generator: GroupElement,
    pub projective_order: u64,
    pub label: ClassLabel,
    /// Labels of all generators of the cyclic subgroup.
    pub signature: Vec<ClassLabel>,
    /// Index of the conjugacy class of the generated cyclic subgroup.
    pub subgroup: usize,
}

fn ser_element<S: serde::Serializer>(g: &GroupElement, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(g.mat().codes())
}

impl ConjClassRep {
    pub fn is_trivial(&self) -> bool {
        self.projective_order == 1
    }
}

impl fmt::Display for ConjClassRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.id, self.projective_order, self.generator.mat())
    }
}

/// All conjugacy classes of elements of PGL(3,p), identity included, in ascending projective
/// order, then signature, then label. Elements generating conjugate cyclic subgroups share
/// a `subgroup` index, assigned in the same order.
pub fn enumerate_cyclic_classes(p: u32) -> Result<Vec<ConjClassRep>> {
    let spec = check_prime(p)?;
    let mut by_label: BTreeMap<ClassLabel, Mat3> = BTreeMap::new();
    for m in gl3_class_representatives(p)? {
        let label = projective_label(&spec, &m)?;
        by_label.entry(label).or_insert(m);
    }
    let mut classes = Vec::with_capacity(by_label.len());
    for (label, m) in by_label {
        let order = projective_order(&spec, &m);
        let signature = subgroup_signature(&spec, &m)?;
        classes.push((order, signature, label, m));
    }
    classes.sort();
    let mut subgroup_of: HashMap<(u64, Vec<ClassLabel>), usize> = HashMap::new();
    let mut out = Vec::with_capacity(classes.len());
    for (id, (order, signature, label, m)) in classes.into_iter().enumerate() {
        let next = subgroup_of.len();
        let subgroup = *subgroup_of.entry((order, signature.clone())).or_insert(next);
        out.push(ConjClassRep {
            id,
            generator: GroupElement::linear(&spec, m)?,
            projective_order: order,
            label,
            signature,
            subgroup,
        });
    }
    Ok(out)
}

/// Number of conjugacy classes of cyclic subgroups among `classes`.
pub fn subgroup_class_count(classes: &[ConjClassRep]) -> usize {
    classes.iter().map(|c| c.subgroup + 1).max().unwrap_or(0)
}

/// One line per class: id, projective order, nine generator codes.
pub fn format_class_list(classes: &[ConjClassRep]) -> String {
    classes.iter().map(|c| format!("{c}\n")).collect()
}

/// Counts for reporting: element classes with and without the identity, and subgroup classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub total: usize,
    pub nontrivial: usize,
    pub subgroups: usize,
    pub nontrivial_subgroups: usize,
}

pub fn class_counts(classes: &[ConjClassRep]) -> ClassCounts {
    let trivial = classes.iter().filter(|c| c.is_trivial()).count();
    let subgroups = subgroup_class_count(classes);
    ClassCounts {
        total: classes.len(),
        nontrivial: classes.len() - trivial,
        subgroups,
        nontrivial_subgroups: subgroups - trivial.min(1),
    }
}

/// Fate of one class in an exclusion sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassStatus {
    /// No invariant arc with `n` points: `m^C_r < n`.
    Excluded,
    /// The budget ran out.
    Undecided,
    /// An invariant arc with at least `n` points exists.
    Found,
    /// Not attempted in this run.
    Skipped,
}

impl fmt::Display for ClassStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Every nontrivial class was excluded: such arcs are rigid or do not exist.
    RigidOrNonexistent,
    /// Some classes remain: an arc is rigid or its automorphism group contains a
    /// conjugate of one of the undecided subgroups.
    RigidOrListedGroups,
    /// Some classes were skipped.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Solver outcome for one cyclic subgroup class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupOutcome {
    pub status: ClassStatus,
    pub solver_status: Status,
    pub ell: usize,
    pub objective: u64,
    pub nodes: u64,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassResult {
    pub id: usize,
    pub subgroup: usize,
    pub projective_order: u64,
    pub generator: [u32; 9],
    pub status: ClassStatus,
    pub ell: Option<usize>,
    pub nodes: Option<u64>,
    pub wall_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExclusionReport {
    pub q: u32,
    pub r: u32,
    pub n: u64,
    pub counts: ClassCounts,
    pub classes: Vec<ClassResult>,
    pub excluded: Vec<usize>,
    /// Classes not excluded: timed out, found, or skipped.
    pub undecided: Vec<usize>,
    pub verdict: Verdict,
}

impl ExclusionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Key/value text; wall times are left out when `with_times` is false.
    pub fn to_text(&self, with_times: bool) -> String {
        let ids = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        let mut s = format!(
            "q={}\nr={}\nn={}\nclasses_total={}\nclasses_nontrivial={}\nsubgroup_classes_total={}\nsubgroup_classes_nontrivial={}\n",
            self.q,
            self.r,
            self.n,
            self.counts.total,
            self.counts.nontrivial,
            self.counts.subgroups,
            self.counts.nontrivial_subgroups
        );
        for c in &self.classes {
            let gen: Vec<String> = c.generator.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!(
                "class id={} subgroup={} order={} status={} ell={} nodes={}",
                c.id,
                c.subgroup,
                c.projective_order,
                c.status,
                c.ell.map_or("-".into(), |v| v.to_string()),
                c.nodes.map_or("-".into(), |v| v.to_string()),
            ));
            if with_times {
                s.push_str(&format!(" wall_ms={}", c.wall_ms.map_or("-".into(), |v| v.to_string())));
            }
            s.push_str(&format!(" generator={}\n", gen.join(",")));
        }
        s.push_str(&format!("excluded={}\nundecided={}\nverdict={}\n", ids(&self.excluded), ids(&self.undecided), self.verdict));
        s
    }
}

#[derive(Clone, Debug)]
pub struct ExclusionOptions {
    pub budget_per_class: Duration,
    pub threads: usize,
    /// Element class ids to leave out.
    pub skip: Vec<usize>,
    /// Per-subgroup results are loaded from and saved to this file.
    pub checkpoint: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ExclusionOptions {
    fn default() -> Self {
        ExclusionOptions {
            budget_per_class: EXCLUSION_BUDGET,
            threads: 1,
            skip: Vec::new(),
            checkpoint: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Checkpoint {
    p: u32,
    r: u32,
    n: u64,
    outcomes: BTreeMap<usize, SubgroupOutcome>,
}

fn load_checkpoint(path: &Path, p: u32, r: u32, n: u64) -> Result<Checkpoint> {
    if !path.exists() {
        return Ok(Checkpoint {
            p,
            r,
            n,
            ..Default::default()
        });
    }
    let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if (cp.p, cp.r, cp.n) != (p, r, n) {
        return domain(format!(
            "checkpoint {} is for q={} r={} n={}, not q={p} r={r} n={n}",
            path.display(),
            cp.p,
            cp.r,
            cp.n
        ));
    }
    Ok(cp)
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string_pretty(cp)?)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

/// Decides, for the cyclic subgroup generated by `generator`, whether an invariant
/// `(n, r)`-arc exists.
pub fn solve_class(plane: &Plane, generator: &GroupElement, r: u32, n: u64, opts: &SolveOptions) -> Result<SubgroupOutcome> {
    let group = Group::cyclic(plane.spec(), *generator)?;
    let orb = orbits(plane, &group)?;
    let model = IlpModel::new(condense(plane, &orb, r)?);
    let sol = solve_feasible(&model, n, opts);
    let status = match sol.status {
        Status::ProvedInfeasible => ClassStatus::Excluded,
        Status::FeasibleFound | Status::Optimal => ClassStatus::Found,
        Status::Timeout => ClassStatus::Undecided,
    };
    Ok(SubgroupOutcome {
        status,
        solver_status: sol.status,
        ell: model.ell(),
        objective: sol.objective,
        nodes: sol.nodes_explored,
        wall_ms: sol.wall_time.as_millis() as u64,
    })
}

/// Runs [`solve_class`] once per nontrivial cyclic subgroup class and derives the verdict.
pub fn run_exclusion(p: u32, r: u32, n: u64, opts: &ExclusionOptions) -> Result<ExclusionReport> {
    let spec = check_prime(p)?;
    if r < 1 || r > p + 1 {
        return domain(format!("r = {r} outside [1, {}]", p + 1));
    }
    let classes = enumerate_cyclic_classes(p)?;
    let plane = Plane::build(&spec);

    let mut checkpoint = match &opts.checkpoint {
        Some(path) => load_checkpoint(path, p, r, n)?,
        None => Checkpoint {
            p,
            r,
            n,
            ..Default::default()
        },
    };

    // first non-skipped nontrivial class of each subgroup not already finished
    let mut jobs: Vec<(usize, GroupElement)> = Vec::new();
    for c in classes.iter().filter(|c| !c.is_trivial() && !opts.skip.contains(&c.id)) {
        if !checkpoint.outcomes.contains_key(&c.subgroup) && !jobs.iter().any(|j| j.0 == c.subgroup) {
            jobs.push((c.subgroup, c.generator));
        }
    }

    let solve_opts = SolveOptions {
        budget: opts.budget_per_class,
        threads: 1,
        deterministic: true,
        seed: opts.seed,
        ..Default::default()
    };
    let next = AtomicUsize::new(0);
    let state = Mutex::new((&mut checkpoint, None::<Error>));
    std::thread::scope(|s| {
        for _ in 0..opts.threads.max(1).min(jobs.len().max(1)) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= jobs.len() || state.lock().unwrap().1.is_some() {
                    return;
                }
                let (sub, gen) = jobs[k];
                let res = solve_class(&plane, &gen, r, n, &solve_opts);
                let mut guard = state.lock().unwrap();
                match res {
                    Ok(outcome) => {
                        guard.0.outcomes.insert(sub, outcome);
                        if let Some(path) = &opts.checkpoint {
                            if let Err(e) = save_checkpoint(path, guard.0) {
                                guard.1 = Some(e);
                            }
                        }
                    }
                    Err(e) => guard.1 = Some(e),
                }
            });
        }
    });
    let (_, err) = state.into_inner().unwrap();
    if let Some(e) = err {
        return Err(e);
    }

    let mut results = Vec::new();
    let (mut excluded, mut undecided) = (Vec::new(), Vec::new());
    let mut any_skipped = false;
    for c in classes.iter().filter(|c| !c.is_trivial()) {
        let outcome = (!opts.skip.contains(&c.id)).then(|| checkpoint.outcomes.get(&c.subgroup)).flatten();
        let status = outcome.map_or(ClassStatus::Skipped, |o| o.status);
        match status {
            ClassStatus::Excluded => excluded.push(c.id),
            ClassStatus::Skipped => {
                any_skipped = true;
                undecided.push(c.id);
            }
            _ => undecided.push(c.id),
        }
        results.push(ClassResult {
            id: c.id,
            subgroup: c.subgroup,
            projective_order: c.projective_order,
            generator: c.generator.mat().codes(),
            status,
            ell: outcome.map(|o| o.ell),
            nodes: outcome.map(|o| o.nodes),
            wall_ms: outcome.map(|o| o.wall_ms),
        });
    }
    let verdict = if any_skipped {
        Verdict::Inconclusive
    } else if undecided.is_empty() {
        Verdict::RigidOrNonexistent
    } else {
        Verdict::RigidOrListedGroups
    };
    Ok(ExclusionReport {
        q: p,
        r,
        n,
        counts: class_counts(&classes),
        classes: results,
        excluded,
        undecided,
        verdict,
    })
}
