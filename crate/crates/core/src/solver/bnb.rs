//! Depth-first branch-and-bound.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use super::heuristic::{greedy_warm_start, never_fits, tabu_run, weight_order};
use super::lp::{combinatorial_bound, Fix, Relaxation, INT_EPS};
use super::{IlpModel, Solution, SolveOptions, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Goal {
    Maximize,
    Reach(u64),
}

struct Shared {
    /// Best objective found so far.
    best_obj: AtomicU64,
    best: Mutex<(u64, Vec<bool>)>,
    trace: Mutex<Vec<(u64, u64)>>,
    nodes: AtomicU64,
    timed_out: AtomicBool,
    reached: AtomicBool,
}

impl Shared {
    fn offer(&self, x: &[bool], obj: u64, goal: Goal) {
        if obj <= self.best_obj.load(Ordering::Relaxed) {
            return;
        }
        let mut best = self.best.lock().unwrap();
        if obj > best.0 {
            *best = (obj, x.to_vec());
            self.best_obj.store(obj, Ordering::Relaxed);
            self.trace.lock().unwrap().push((self.nodes.load(Ordering::Relaxed), obj));
        }
        if let Goal::Reach(t) = goal {
            if best.0 >= t {
                self.reached.store(true, Ordering::Relaxed);
            }
        }
    }
}

struct Worker<'a> {
    model: &'a IlpModel,
    shared: &'a Shared,
    goal: Goal,
    deadline: Instant,
    fix: Vec<Fix>,
    loads: Vec<u32>,
    free_load: Vec<u32>,
    fixed_obj: u64,
    free_weight: u64,
    trail: Vec<usize>,
    order: Vec<usize>,
    scratch: Vec<usize>,
    local_nodes: u64,
}

enum Step {
    Continue,
    Stop,
}

impl<'a> Worker<'a> {
    fn new(model: &'a IlpModel, shared: &'a Shared, goal: Goal, deadline: Instant) -> Worker<'a> {
        let ell = model.ell();
        let mut free_load = vec![0u32; ell];
        for j in 0..ell {
            for &(i, a) in model.col(j) {
                free_load[i as usize] += a;
            }
        }
        let mut w = Worker {
            model,
            shared,
            goal,
            deadline,
            fix: vec![Fix::Free; ell],
            loads: vec![0; ell],
            free_load,
            fixed_obj: 0,
            free_weight: model.weights().iter().sum(),
            trail: Vec::new(),
            order: weight_order(model),
            scratch: Vec::new(),
            local_nodes: 0,
        };
        for j in 0..ell {
            if never_fits(model, j) {
                w.assign(j, Fix::Zero);
            }
        }
        w.trail.clear();
        w
    }

    fn assign(&mut self, j: usize, f: Fix) {
        debug_assert_eq!(self.fix[j], Fix::Free);
        self.fix[j] = f;
        self.trail.push(j);
        self.free_weight -= self.model.weights()[j];
        let one = f == Fix::One;
        if one {
            self.fixed_obj += self.model.weights()[j];
        }
        for &(i, a) in self.model.col(j) {
            self.free_load[i as usize] -= a;
            if one {
                self.loads[i as usize] += a;
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let j = self.trail.pop().unwrap();
            let one = self.fix[j] == Fix::One;
            self.fix[j] = Fix::Free;
            self.free_weight += self.model.weights()[j];
            if one {
                self.fixed_obj -= self.model.weights()[j];
            }
            for &(i, a) in self.model.col(j) {
                self.free_load[i as usize] += a;
                if one {
                    self.loads[i as usize] -= a;
                }
            }
        }
    }

    /// Fixes `j` to one and every free column that would then overflow a row to zero.
    /// Returns false if `j` itself does not fit.
    fn set_one(&mut self, j: usize) -> bool {
        let r = self.model.r();
        if self.model.col(j).iter().any(|&(i, a)| self.loads[i as usize] + a > r) {
            return false;
        }
        self.assign(j, Fix::One);
        for &(i, _) in self.model.col(j) {
            let i = i as usize;
            let slack = r - self.loads[i];
            for &(k, a) in self.model.row(i) {
                let k = k as usize;
                if a > slack && self.fix[k] == Fix::Free {
                    self.assign(k, Fix::Zero);
                }
            }
        }
        true
    }

    fn threshold(&self) -> u64 {
        match self.goal {
            Goal::Maximize => self.shared.best_obj.load(Ordering::Relaxed) + 1,
            Goal::Reach(t) => t,
        }
    }

    fn check_stop(&mut self) -> Step {
        if self.shared.timed_out.load(Ordering::Relaxed) || self.shared.reached.load(Ordering::Relaxed) {
            return Step::Stop;
        }
        if self.local_nodes % 64 == 0 && Instant::now() >= self.deadline {
            self.shared.timed_out.store(true, Ordering::Relaxed);
            return Step::Stop;
        }
        Step::Continue
    }

    fn comb_bound(&self) -> u64 {
        combinatorial_bound(self.model, self.fixed_obj, self.free_weight, &self.loads, &self.free_load)
    }

    /// Applies the fixes made since `mark` to a copy of `lp`, rebuilding from scratch on failure.
    fn child_lp(&self, lp: &Option<Relaxation>, mark: usize) -> Option<Relaxation> {
        let mut cur = lp.clone();
        for &j in &self.trail[mark..] {
            cur = cur.and_then(|l| l.fix(j, self.fix[j] == Fix::One));
            if cur.is_none() {
                break;
            }
        }
        cur.or_else(|| Relaxation::build(self.model, &self.fix))
    }

    /// Completes the current partial assignment greedily, preferring large LP values.
    fn round(&mut self, lp: Option<&Relaxation>) {
        let r = self.model.r();
        let mut loads = self.loads.clone();
        let mut x: Vec<bool> = self.fix.iter().map(|&f| f == Fix::One).collect();
        let mut obj = self.fixed_obj;
        self.scratch.clear();
        self.scratch.extend(self.order.iter().copied().filter(|&j| self.fix[j] == Fix::Free));
        if let Some(lp) = lp {
            let vals: Vec<f64> = self.scratch.iter().map(|&j| lp.value(j)).collect();
            let mut idx: Vec<usize> = (0..self.scratch.len()).collect();
            // stable: equal LP values keep weight order
            idx.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal));
            let sorted: Vec<usize> = idx.iter().map(|&k| self.scratch[k]).collect();
            self.scratch = sorted;
        }
        for &j in &self.scratch {
            if self.model.col(j).iter().all(|&(i, a)| loads[i as usize] + a <= r) {
                x[j] = true;
                obj += self.model.weights()[j];
                for &(i, a) in self.model.col(j) {
                    loads[i as usize] += a;
                }
            }
        }
        self.shared.offer(&x, obj, self.goal);
    }

    fn branch_var(&self, lp: Option<&Relaxation>) -> Option<usize> {
        let w = self.model.weights();
        let free = (0..self.fix.len()).filter(|&j| self.fix[j] == Fix::Free);
        match lp {
            Some(lp) => {
                let mut best: Option<(f64, u64, usize)> = None;
                let mut fallback: Option<(f64, u64, usize)> = None;
                for j in free {
                    let v = lp.value(j);
                    if v > INT_EPS && v < 1.0 - INT_EPS {
                        let dist = (v - 0.5).abs();
                        let better = match best {
                            None => true,
                            Some((bd, bw, _)) => dist < bd - 1e-12 || ((dist - bd).abs() <= 1e-12 && w[j] > bw),
                        };
                        if better {
                            best = Some((dist, w[j], j));
                        }
                    } else {
                        let better = match fallback {
                            None => true,
                            Some((bv, bw, _)) => v > bv + 1e-12 || ((v - bv).abs() <= 1e-12 && w[j] > bw),
                        };
                        if better {
                            fallback = Some((v, w[j], j));
                        }
                    }
                }
                best.or(fallback).map(|t| t.2)
            }
            None => self.order.iter().copied().find(|&j| self.fix[j] == Fix::Free),
        }
    }

    fn node(&mut self, lp: Option<Relaxation>) -> Step {
        if let Step::Stop = self.check_stop() {
            return Step::Stop;
        }
        self.local_nodes += 1;
        self.shared.nodes.fetch_add(1, Ordering::Relaxed);

        let comb = self.comb_bound();
        if comb < self.threshold() {
            return Step::Continue;
        }
        let bound = lp.as_ref().map_or(comb, |l| comb.min(l.bound()));
        if bound < self.threshold() {
            return Step::Continue;
        }
        self.round(lp.as_ref());
        if self.shared.reached.load(Ordering::Relaxed) {
            return Step::Stop;
        }
        if bound < self.threshold() {
            return Step::Continue;
        }
        let Some(j) = self.branch_var(lp.as_ref()) else {
            return Step::Continue;
        };

        let mark = self.trail.len();
        if self.set_one(j) {
            let child = self.child_lp(&lp, mark);
            let step = self.node(child);
            self.undo_to(mark);
            if let Step::Stop = step {
                return Step::Stop;
            }
        }
        self.assign(j, Fix::Zero);
        let child = self.child_lp(&lp, mark);
        let step = self.node(child);
        self.undo_to(mark);
        step
    }

    /// Applies a list of decisions from the root; false if they are contradictory.
    fn apply_path(&mut self, path: &[(usize, bool)]) -> bool {
        for &(j, one) in path {
            match self.fix[j] {
                Fix::Free => {
                    if one {
                        if !self.set_one(j) {
                            return false;
                        }
                    } else {
                        self.assign(j, Fix::Zero);
                    }
                }
                Fix::One if one => {}
                Fix::Zero if !one => {}
                _ => return false,
            }
        }
        true
    }
}

fn run(model: &IlpModel, goal: Goal, opts: &SolveOptions) -> Solution {
    let start = Instant::now();
    let deadline = start + opts.budget;
    let ell = model.ell();

    // warm start
    let mut warm = greedy_warm_start(model).x;
    if let Some(init) = &opts.initial {
        if model.is_feasible(init) && model.objective(init) > model.objective(&warm) {
            warm = init.clone();
        }
    }
    if opts.local_search_iterations > 0 {
        let stop_at = match goal {
            Goal::Maximize => u64::MAX,
            Goal::Reach(t) => t,
        };
        let improved = tabu_run(model, &warm, opts.local_search_iterations, opts.seed, stop_at, Some(deadline));
        if model.objective(&improved) > model.objective(&warm) {
            warm = improved;
        }
    }
    let warm_obj = model.objective(&warm);

    let shared = Shared {
        best_obj: AtomicU64::new(0),
        best: Mutex::new((0, vec![false; ell])),
        trace: Mutex::new(Vec::new()),
        nodes: AtomicU64::new(0),
        timed_out: AtomicBool::new(false),
        reached: AtomicBool::new(goal == Goal::Reach(0)),
    };
    shared.offer(&warm, warm_obj, goal);

    let mut root = Worker::new(model, &shared, goal, deadline);
    let root_lp = Relaxation::build(model, &root.fix);
    let root_bound = root_lp.as_ref().map_or(root.comb_bound(), |l| root.comb_bound().min(l.bound()));

    if !shared.reached.load(Ordering::Relaxed) {
        let threads = if opts.deterministic { 1 } else { opts.threads.max(1) };
        if threads == 1 {
            root.node(root_lp.clone());
        } else {
            run_parallel(model, &shared, goal, deadline, root_lp.as_ref(), threads);
        }
    }

    let (objective, x) = shared.best.lock().unwrap().clone();
    let timed_out = shared.timed_out.load(Ordering::Relaxed);
    let status = match goal {
        Goal::Maximize if timed_out => Status::Timeout,
        Goal::Maximize => Status::Optimal,
        Goal::Reach(t) if objective >= t => Status::FeasibleFound,
        Goal::Reach(_) if timed_out => Status::Timeout,
        Goal::Reach(_) => Status::ProvedInfeasible,
    };
    let trace = shared.trace.lock().unwrap().clone();
    Solution {
        x,
        objective,
        status,
        nodes_explored: shared.nodes.load(Ordering::Relaxed),
        wall_time: start.elapsed(),
        root_bound: root_bound.max(objective),
        incumbent_trace: trace,
    }
}

/// Splits the root on the first few branching columns and searches the pieces in a pool.
fn run_parallel(
    model: &IlpModel,
    shared: &Shared,
    goal: Goal,
    deadline: Instant,
    root_lp: Option<&Relaxation>,
    threads: usize,
) {
    let probe = Worker::new(model, shared, goal, deadline);
    let free: Vec<usize> = (0..model.ell()).filter(|&j| probe.fix[j] == Fix::Free).collect();
    let mut split: Vec<usize> = free.clone();
    if let Some(lp) = root_lp {
        split.sort_by(|&a, &b| {
            let da = (lp.value(a) - 0.5).abs();
            let db = (lp.value(b) - 0.5).abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        });
    } else {
        split = probe.order.iter().copied().filter(|j| free.contains(j)).collect();
    }
    let depth = ((threads * 4) as f64).log2().ceil() as usize;
    split.truncate(depth.min(free.len()));

    let pieces: Vec<Vec<(usize, bool)>> = (0..1usize << split.len())
        .map(|mask| split.iter().enumerate().map(|(b, &j)| (j, mask & (1 << b) != 0)).collect())
        .collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= pieces.len() {
                    return;
                }
                let mut wk = Worker::new(model, shared, goal, deadline);
                if !wk.apply_path(&pieces[k]) {
                    continue;
                }
                let lp = Relaxation::build(model, &wk.fix);
                if let Step::Stop = wk.node(lp) {
                    return;
                }
            });
        }
    });
}

/// Maximizes `w.x` subject to `A x <= r`.
pub fn solve_max(model: &IlpModel, opts: &SolveOptions) -> Solution {
    run(model, Goal::Maximize, opts)
}

/// Searches for `x` with `A x <= r` and `w.x >= target`.
pub fn solve_feasible(model: &IlpModel, target: u64, opts: &SolveOptions) -> Solution {
    run(model, Goal::Reach(target), opts)
}
