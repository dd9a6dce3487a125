//! 0/1 maximization `max w.x  s.t.  A x <= r, x in {0,1}^ell` for condensed systems.
//!
//! [`solve_max`] and [`solve_feasible`] run a depth-first branch-and-bound with an LP
//! relaxation bound, seeded by [`greedy_warm_start`] and a tabu search. The
//! [`exhaustive_oracle`] enumerates all selections of tiny instances and is kept
//! independent of the search code so it can serve as ground truth.

mod bnb;
mod heuristic;
mod lp;
mod oracle;

use std::fmt;
use std::time::Duration;

use crate::condense::{condense, CondensedSystem};
use crate::error::Result;
use crate::geometry::Plane;
use crate::group::{orbits, Group};

pub use bnb::{solve_feasible, solve_max};
pub use heuristic::{greedy_warm_start, tabu_search};
pub use lp::{lp_bound, Fix};
pub use oracle::{exhaustive_oracle, ORACLE_MAX_ELL};

/// Default per-solve wall-clock budget.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(60);
/// Budget used for exclusion runs.
pub const EXCLUSION_BUDGET: Duration = Duration::from_secs(5000);

/// The integer program of a condensed system, with sparse row and column views.
#[derive(Clone, Debug)]
pub struct IlpModel {
    system: CondensedSystem,
    cols: Vec<Vec<(u32, u32)>>,
    rows: Vec<Vec<(u32, u32)>>,
}

impl IlpModel {
    pub fn new(system: CondensedSystem) -> IlpModel {
        let ell = system.ell();
        let mut cols = vec![Vec::new(); ell];
        let mut rows = vec![Vec::new(); ell];
        for (i, row) in system.a.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a > 0 {
                    cols[j].push((i as u32, a));
                    rows[i].push((j as u32, a));
                }
            }
        }
        IlpModel { system, cols, rows }
    }

    /// The uncondensed problem over all points of the plane.
    pub fn full_plane(plane: &Plane, r: u32) -> Result<IlpModel> {
        let orb = orbits(plane, &Group::trivial(plane.spec()))?;
        Ok(IlpModel::new(condense(plane, &orb, r)?))
    }

    pub fn system(&self) -> &CondensedSystem {
        &self.system
    }

    pub fn ell(&self) -> usize {
        self.system.ell()
    }

    pub fn r(&self) -> u32 {
        self.system.r
    }

    pub fn weights(&self) -> &[u64] {
        &self.system.w
    }

    /// Right-hand side `r * u`.
    pub fn rhs(&self) -> Vec<u64> {
        vec![self.system.r as u64; self.ell()]
    }

    /// Nonzero `(row, coefficient)` pairs of column `j`.
    pub fn col(&self, j: usize) -> &[(u32, u32)] {
        &self.cols[j]
    }

    /// Nonzero `(column, coefficient)` pairs of row `i`.
    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.rows[i]
    }

    pub fn loads(&self, x: &[bool]) -> Vec<u32> {
        let mut loads = vec![0u32; self.ell()];
        for (j, _) in x.iter().enumerate().filter(|(_, &s)| s) {
            for &(i, a) in &self.cols[j] {
                loads[i as usize] += a;
            }
        }
        loads
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        x.len() == self.ell() && self.loads(x).iter().all(|&l| l <= self.system.r)
    }

    pub fn objective(&self, x: &[bool]) -> u64 {
        x.iter().zip(&self.system.w).filter(|(&s, _)| s).map(|(_, &w)| w).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Status {
    Optimal,
    FeasibleFound,
    ProvedInfeasible,
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Optimal => "Optimal",
            Status::FeasibleFound => "FeasibleFound",
            Status::ProvedInfeasible => "ProvedInfeasible",
            Status::Timeout => "Timeout",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<bool>,
    pub objective: u64,
    pub status: Status,
    pub nodes_explored: u64,
    pub wall_time: Duration,
    /// Bound at the root node.
    pub root_bound: u64,
    /// `(node, objective)` each time the incumbent improved.
    pub incumbent_trace: Vec<(u64, u64)>,
}

impl Solution {
    pub fn x_string(&self) -> String {
        self.x.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub budget: Duration,
    pub threads: usize,
    /// Single-threaded, reproducible search.
    pub deterministic: bool,
    /// Tabu-search iterations spent improving the warm start before branching.
    pub local_search_iterations: u64,
    pub seed: u64,
    /// Known feasible selection to start from.
    pub initial: Option<Vec<bool>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: DEFAULT_BUDGET,
            threads: 1,
            deterministic: true,
            local_search_iterations: 20_000,
            seed: 0,
            initial: None,
        }
    }
}

impl SolveOptions {
    pub fn with_budget(budget: Duration) -> Self {
        SolveOptions {
            budget,
            ..Default::default()
        }
    }
}
