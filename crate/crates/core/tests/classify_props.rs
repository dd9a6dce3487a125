mod common;

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use pg2arcs::classify::{
    canonical_label, class_counts, enumerate_cyclic_classes, gl3_class_representatives, projective_label,
    projective_order, run_exclusion, ClassStatus, ExclusionOptions, Verdict,
};
use pg2arcs::condense::condense;
use pg2arcs::geometry::Plane;
use pg2arcs::gf::FieldSpec;
use pg2arcs::group::{orbits, Group};
use pg2arcs::matrix::Mat3;
use pg2arcs::solver::{exhaustive_oracle, IlpModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type M = [u32; 9];

fn mul(p: u32, a: &M, b: &M) -> M {
    let mut c = [0u32; 9];
    for i in 0..3 {
        for j in 0..3 {
            c[3 * i + j] = (0..3).map(|k| a[3 * i + k] * b[3 * k + j]).sum::<u32>() % p;
        }
    }
    c
}

fn det(p: u32, a: &M) -> u32 {
    let t = |i: usize, j: usize, k: usize| a[i] * a[j] % p * a[k] % p;
    (t(0, 4, 8) + t(1, 5, 6) + t(2, 3, 7) + 3 * p * p - t(2, 4, 6) - t(0, 5, 7) - t(1, 3, 8)) % p
}

fn scale(p: u32, a: &M, s: u32) -> M {
    a.map(|x| x * s % p)
}

/// Conjugacy classes of GL(3,p) computed by closing each element under conjugation by a
/// generating set, using plain integer matrices.
struct Brute {
    p: u32,
    elems: Vec<M>,
    class: HashMap<M, usize>,
    classes: usize,
}

impl Brute {
    fn new(p: u32) -> Brute {
        let mut elems = Vec::new();
        for code in 0..p.pow(9) {
            let mut c = code;
            let m: M = std::array::from_fn(|_| {
                let d = c % p;
                c /= p;
                d
            });
            if det(p, &m) != 0 {
                elems.push(m);
            }
        }
        let id: M = [1, 0, 0, 0, 1, 0, 0, 0, 1];
        let g = (2..p).find(|&g| (1..p - 1).all(|k| g.pow(k) % p != 1)).unwrap_or(1);
        let mut gens: Vec<(M, M)> = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let (mut e, mut f) = (id, id);
                    e[3 * i + j] = 1;
                    f[3 * i + j] = p - 1;
                    gens.push((e, f));
                }
            }
        }
        let ginv = (1..p).find(|&x| x * g % p == 1).unwrap();
        let (mut d, mut dinv) = (id, id);
        d[0] = g;
        dinv[0] = ginv;
        gens.push((d, dinv));

        let mut class = HashMap::new();
        let mut classes = 0;
        for &m in &elems {
            if class.contains_key(&m) {
                continue;
            }
            let mut stack = vec![m];
            class.insert(m, classes);
            while let Some(x) = stack.pop() {
                for (a, ainv) in &gens {
                    let y = mul(p, &mul(p, a, &x), ainv);
                    if let std::collections::hash_map::Entry::Vacant(v) = class.entry(y) {
                        v.insert(classes);
                        stack.push(y);
                    }
                }
            }
            classes += 1;
        }
        Brute { p, elems, class, classes }
    }

    /// PGL class: smallest GL class id among scalar multiples.
    fn pgl(&self, m: &M) -> usize {
        (1..self.p).map(|s| self.class[&scale(self.p, m, s)]).min().unwrap()
    }

    fn proj_order(&self, m: &M) -> u64 {
        let mut x = *m;
        let mut k = 1;
        while !(x[1] == 0 && x[2] == 0 && x[3] == 0 && x[5] == 0 && x[6] == 0 && x[7] == 0 && x[0] == x[4] && x[4] == x[8]) {
            x = mul(self.p, &x, m);
            k += 1;
        }
        k
    }

    fn pow(&self, m: &M, k: u64) -> M {
        let mut x: M = [1, 0, 0, 0, 1, 0, 0, 0, 1];
        for _ in 0..k {
            x = mul(self.p, &x, m);
        }
        x
    }

    /// Cyclic-subgroup class: the set of PGL classes of the generators.
    fn subgroup_key(&self, m: &M) -> Vec<usize> {
        let n = self.proj_order(m);
        let mut v: Vec<usize> = (1..=n).filter(|&k| gcd(k, n) == 1).map(|k| self.pgl(&self.pow(m, k))).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn codes(m: &Mat3) -> M {
    m.codes()
}

#[test]
fn enumeration_is_complete_for_small_primes() {
    for (p, gl, pgl, subgroups) in [(2u32, 6usize, 6usize, 5usize), (3, 24, 12, 8)] {
        let b = Brute::new(p);
        assert_eq!(b.classes, gl, "GL classes p={p}");
        let spec = FieldSpec::prime(p).unwrap();

        // GL representatives: one per class, label is a class invariant and separates classes
        let reps = gl3_class_representatives(p).unwrap();
        let hit: HashSet<usize> = reps.iter().map(|m| b.class[&codes(m)]).collect();
        assert_eq!((reps.len(), hit.len()), (gl, gl));
        let mut label_of_class = HashMap::new();
        for m in &b.elems {
            let l = canonical_label(&spec, &Mat3::from_codes(&spec, m).unwrap()).unwrap();
            assert_eq!(*label_of_class.entry(b.class[m]).or_insert_with(|| l.clone()), l);
        }
        let labels: HashSet<_> = label_of_class.values().collect();
        assert_eq!(labels.len(), gl);

        // PGL element classes and cyclic subgroup classes
        let all_pgl: HashSet<usize> = b.elems.iter().map(|m| b.pgl(m)).collect();
        assert_eq!(all_pgl.len(), pgl);
        let all_sub: HashSet<Vec<usize>> = b.elems.iter().map(|m| b.subgroup_key(m)).collect();
        assert_eq!(all_sub.len(), subgroups);

        let classes = enumerate_cyclic_classes(p).unwrap();
        let ids: HashSet<usize> = classes.iter().map(|c| b.pgl(&c.generator.mat().codes())).collect();
        assert_eq!((classes.len(), ids.len()), (pgl, pgl));
        for x in &classes {
            let gx = x.generator.mat().codes();
            assert_eq!(x.projective_order, b.proj_order(&gx));
            for y in &classes {
                let same = b.subgroup_key(&gx) == b.subgroup_key(&y.generator.mat().codes());
                assert_eq!(x.subgroup == y.subgroup, same, "p={p} classes {} {}", x.id, y.id);
            }
        }
        let counts = class_counts(&classes);
        assert_eq!((counts.total, counts.subgroups), (pgl, subgroups));
    }
}

#[test]
fn subgroup_class_counts() {
    for (p, want) in [(5u32, 14usize), (7, 21), (11, 28), (13, 35)] {
        let counts = class_counts(&enumerate_cyclic_classes(p).unwrap());
        assert_eq!(counts.subgroups, want, "p={p}");
        assert_eq!(counts.nontrivial, counts.total - 1);
        assert_eq!(counts.nontrivial_subgroups, want - 1);
    }
}

#[test]
fn rejects_unsupported_fields() {
    assert!(enumerate_cyclic_classes(4).is_err());
    assert!(enumerate_cyclic_classes(37).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_are_conjugation_and_scalar_invariant(p in prop::sample::select(vec![5u32, 7, 11, 13]), seed in any::<u64>()) {
        let spec = FieldSpec::prime(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_element(&spec, &mut rng, false);
        let t = common::random_element(&spec, &mut rng, false);
        let m = *g.mat();
        let c = t.mat().mul(&spec, &m).mul(&spec, &t.mat().inverse(&spec).unwrap());
        prop_assert_eq!(canonical_label(&spec, &m).unwrap(), canonical_label(&spec, &c).unwrap());
        let s = spec.element(rand::Rng::gen_range(&mut rng, 1..p)).unwrap();
        prop_assert_eq!(projective_label(&spec, &m).unwrap(), projective_label(&spec, &c.scale(&spec, s)).unwrap());
        prop_assert_eq!(projective_order(&spec, &m), projective_order(&spec, &c));
    }
}

/// Maximum over arcs invariant under the subgroup generated by `gen`, by exhaustive search.
fn invariant_max(plane: &Plane, gen: &pg2arcs::group::GroupElement, r: u32) -> u64 {
    let orb = orbits(plane, &Group::cyclic(plane.spec(), *gen).unwrap()).unwrap();
    exhaustive_oracle(&IlpModel::new(condense(plane, &orb, r).unwrap())).unwrap().objective
}

#[test]
fn exclusion_agrees_with_exhaustive_search() {
    let plane = Plane::build(&FieldSpec::prime(3).unwrap());
    let classes = enumerate_cyclic_classes(3).unwrap();
    for (r, n) in [(2u32, 4u64), (2, 5), (3, 7), (3, 9)] {
        let rep = run_exclusion(3, r, n, &ExclusionOptions::default()).unwrap();
        for res in &rep.classes {
            let c = &classes[res.id];
            let found = invariant_max(&plane, &c.generator, r) >= n;
            let want = if found { ClassStatus::Found } else { ClassStatus::Excluded };
            assert_eq!(res.status, want, "r={r} n={n} class {}", res.id);
        }
        let want = if rep.undecided.is_empty() { Verdict::RigidOrNonexistent } else { Verdict::RigidOrListedGroups };
        assert_eq!(rep.verdict, want);
    }
}

#[test]
fn checkpoint_resume_reproduces_the_sweep() {
    let dir = std::env::temp_dir().join(format!("pg2arcs-cp-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q5.json");
    let _ = std::fs::remove_file(&path);
    let plain = run_exclusion(5, 2, 7, &ExclusionOptions::default()).unwrap();
    let opts = ExclusionOptions {
        checkpoint: Some(path.clone()),
        threads: 2,
        ..Default::default()
    };
    let first = run_exclusion(5, 2, 7, &opts).unwrap();
    assert!(path.exists());
    // the second run finds every subgroup in the checkpoint, so even a zero budget succeeds
    let resumed = run_exclusion(
        5,
        2,
        7,
        &ExclusionOptions {
            budget_per_class: Duration::ZERO,
            ..opts.clone()
        },
    )
    .unwrap();
    assert_eq!(first.to_text(false), plain.to_text(false));
    assert_eq!(resumed.to_text(false), plain.to_text(false));
    assert!(run_exclusion(5, 2, 8, &opts).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn skipped_classes_make_the_verdict_inconclusive() {
    let opts = ExclusionOptions {
        skip: vec![1],
        ..Default::default()
    };
    let rep = run_exclusion(5, 2, 7, &opts).unwrap();
    assert_eq!(rep.verdict, Verdict::Inconclusive);
    assert!(rep.classes.iter().any(|c| c.status == ClassStatus::Skipped));
}
