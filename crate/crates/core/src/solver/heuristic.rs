//! Primal heuristics: greedy construction with local repair, and tabu search.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{IlpModel, Solution, Status};

/// Columns ordered by decreasing weight, ties by index.
pub(crate) fn weight_order(model: &IlpModel) -> Vec<usize> {
    let w = model.weights();
    let mut order: Vec<usize> = (0..model.ell()).collect();
    order.sort_by(|&a, &b| w[b].cmp(&w[a]).then(a.cmp(&b)));
    order
}

/// Whether column `j` alone already exceeds `r` on some row.
pub(crate) fn never_fits(model: &IlpModel, j: usize) -> bool {
    model.col(j).iter().any(|&(_, a)| a > model.r())
}

struct State<'a> {
    model: &'a IlpModel,
    x: Vec<bool>,
    loads: Vec<u32>,
    obj: u64,
}

impl<'a> State<'a> {
    fn new(model: &'a IlpModel, x: &[bool]) -> State<'a> {
        State {
            model,
            x: x.to_vec(),
            loads: model.loads(x),
            obj: model.objective(x),
        }
    }

    fn fits(&self, j: usize) -> bool {
        let r = self.model.r();
        self.model.col(j).iter().all(|&(i, a)| self.loads[i as usize] + a <= r)
    }

    fn set(&mut self, j: usize, on: bool) {
        debug_assert_ne!(self.x[j], on);
        self.x[j] = on;
        for &(i, a) in self.model.col(j) {
            if on {
                self.loads[i as usize] += a;
            } else {
                self.loads[i as usize] -= a;
            }
        }
        let w = self.model.weights()[j];
        if on {
            self.obj += w;
        } else {
            self.obj -= w;
        }
    }

    /// Whether swapping selected `k` out for unselected `j` stays feasible.
    fn swap_fits(&self, k: usize, j: usize) -> bool {
        let r = self.model.r();
        let a = &self.model.system().a;
        self.model
            .col(j)
            .iter()
            .all(|&(i, aj)| self.loads[i as usize] - a[i as usize][k] + aj <= r)
    }

    /// Adds columns in `order` while feasible, then applies improving 1-swaps until none remain.
    fn local_improve(&mut self, order: &[usize]) {
        let w = self.model.weights();
        loop {
            for &j in order {
                if !self.x[j] && self.fits(j) {
                    self.set(j, true);
                }
            }
            let mut swapped = false;
            'outer: for &j in order {
                if self.x[j] {
                    continue;
                }
                for &k in order.iter().rev() {
                    if w[k] >= w[j] {
                        break;
                    }
                    if self.x[k] && self.swap_fits(k, j) {
                        self.set(k, false);
                        self.set(j, true);
                        swapped = true;
                        break 'outer;
                    }
                }
            }
            if !swapped {
                return;
            }
        }
    }
}

/// Descending-weight insertion followed by add and swap improvement.
pub fn greedy_warm_start(model: &IlpModel) -> Solution {
    let start = Instant::now();
    let order = weight_order(model);
    let mut st = State::new(model, &vec![false; model.ell()]);
    st.local_improve(&order);
    Solution {
        objective: st.obj,
        x: st.x,
        status: Status::FeasibleFound,
        nodes_explored: 0,
        wall_time: start.elapsed(),
        root_bound: model.weights().iter().sum(),
        incumbent_trace: Vec::new(),
    }
}

/// Tabu search over feasible selections, started from the feasible vector `start`.
///
/// Each step adds the heaviest non-tabu column that fits; when none fits it adds the column
/// whose insertion, after greedily dropping the cheapest conflicting columns, loses the
/// least weight. Changed columns stay tabu for a few steps. The search is fully determined
/// by `seed` and `iterations`. Returns the best selection seen.
pub fn tabu_search(model: &IlpModel, start: &[bool], iterations: u64, seed: u64) -> Vec<bool> {
    tabu_run(model, start, iterations, seed, u64::MAX, None)
}

/// Tabu search that also stops once the objective reaches `stop_at` or `deadline` passes.
pub(crate) fn tabu_run(
    model: &IlpModel,
    start: &[bool],
    iterations: u64,
    seed: u64,
    stop_at: u64,
    deadline: Option<Instant>,
) -> Vec<bool> {
    let ell = model.ell();
    assert!(model.is_feasible(start), "tabu search needs a feasible start");
    if ell == 0 {
        return Vec::new();
    }
    let w = model.weights();
    let r = model.r() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = weight_order(model);
    let blocked: Vec<bool> = (0..ell).map(|j| never_fits(model, j)).collect();

    let mut st = State::new(model, start);
    st.local_improve(&order);
    let mut best = st.x.clone();
    let mut best_obj = st.obj;

    let base_tenure = ((ell as u64) / 10).clamp(1, 12);
    let stall_limit = (20 * ell as u64).max(200);
    let mut add_tabu = vec![0u64; ell];
    let mut drop_tabu = vec![0u64; ell];
    let mut last_gain = 0u64;

    let mut excess = vec![0i64; ell];
    let mut touched: Vec<usize> = Vec::new();
    let mut removal: Vec<usize> = Vec::new();
    let mut in_removal = vec![false; ell];
    let mut best_removal: Vec<usize> = Vec::new();

    for it in 1..=iterations {
        if best_obj >= stop_at || (it % 256 == 0 && deadline.is_some_and(|d| Instant::now() >= d)) {
            break;
        }
        let tenure = base_tenure + rng.gen_range(0..=base_tenure);

        // plain insertion
        let mut add: Option<(u64, u32, usize)> = None;
        for j in 0..ell {
            if st.x[j] || blocked[j] || !st.fits(j) {
                continue;
            }
            if add_tabu[j] > it && st.obj + w[j] <= best_obj {
                continue;
            }
            let key = (w[j], rng.gen::<u32>(), j);
            if add.map_or(true, |(bw, bt, _)| (key.0, key.1) > (bw, bt)) {
                add = Some(key);
            }
        }
        if let Some((_, _, j)) = add {
            st.set(j, true);
            drop_tabu[j] = it + tenure;
        } else {
            // insertion with repair
            let mut choice: Option<(i64, u32, usize)> = None;
            for j in 0..ell {
                if st.x[j] || blocked[j] {
                    continue;
                }
                touched.clear();
                for &(i, a) in model.col(j) {
                    let e = st.loads[i as usize] as i64 + a as i64 - r;
                    if e > 0 {
                        excess[i as usize] = e;
                        touched.push(i as usize);
                    }
                }
                removal.clear();
                let mut loss = 0u64;
                let mut ok = true;
                for t in 0..touched.len() {
                    let i = touched[t];
                    while excess[i] > 0 {
                        let pick = model
                            .row(i)
                            .iter()
                            .filter(|&&(k, _)| st.x[k as usize] && !in_removal[k as usize])
                            .min_by_key(|&&(k, a)| {
                                let k = k as usize;
                                (drop_tabu[k] > it, w[k], std::cmp::Reverse(a), k)
                            });
                        let Some(&(k, _)) = pick else {
                            ok = false;
                            break;
                        };
                        let k = k as usize;
                        in_removal[k] = true;
                        removal.push(k);
                        loss += w[k];
                        for &(i2, a2) in model.col(k) {
                            excess[i2 as usize] -= a2 as i64;
                        }
                    }
                    if !ok {
                        break;
                    }
                }
                // reset scratch: rows touched by j or by removed columns
                for &(i, _) in model.col(j) {
                    excess[i as usize] = 0;
                }
                for &k in &removal {
                    in_removal[k] = false;
                    for &(i2, _) in model.col(k) {
                        excess[i2 as usize] = 0;
                    }
                }
                if !ok {
                    continue;
                }
                let delta = w[j] as i64 - loss as i64;
                let aspiration = (st.obj as i64 + delta) > best_obj as i64;
                if add_tabu[j] > it && !aspiration {
                    continue;
                }
                let key = (delta, rng.gen::<u32>(), j);
                if choice.map_or(true, |(bd, bt, _)| (key.0, key.1) > (bd, bt)) {
                    choice = Some(key);
                    best_removal.clone_from(&removal);
                }
            }
            let Some((_, _, j)) = choice else {
                // everything is tabu; release and carry on
                add_tabu.iter_mut().for_each(|t| *t = 0);
                continue;
            };
            for &k in &best_removal {
                st.set(k, false);
                add_tabu[k] = it + tenure;
            }
            st.set(j, true);
            drop_tabu[j] = it + tenure;
        }

        if st.obj > best_obj {
            best_obj = st.obj;
            best.clone_from(&st.x);
            last_gain = it;
        } else if it - last_gain > stall_limit {
            // perturb: drop a random part of the current selection
            let mut selected: Vec<usize> = (0..ell).filter(|&j| st.x[j]).collect();
            selected.shuffle(&mut rng);
            let drop = (selected.len() / 4).max(1).min(selected.len());
            for &k in &selected[..drop] {
                st.set(k, false);
                add_tabu[k] = it + tenure;
            }
            last_gain = it;
        }
    }
    debug_assert!(model.is_feasible(&best));
    best
}
