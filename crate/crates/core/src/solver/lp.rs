//! LP relaxation and the integer fallback bound used by branch-and-bound.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use super::IlpModel;

/// State of one variable in a partial assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fix {
    Free,
    Zero,
    One,
}

/// Slack added before flooring an LP objective.
pub(crate) const BOUND_EPS: f64 = 1e-6;
/// Values closer than this to 0 or 1 count as integral.
pub(crate) const INT_EPS: f64 = 1e-9;

#[derive(Clone)]
pub(crate) struct Relaxation {
    sol: minilp::Solution,
    vars: Vec<Variable>,
}

impl Relaxation {
    pub(crate) fn build(model: &IlpModel, fix: &[Fix]) -> Option<Relaxation> {
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<Variable> = model
            .weights()
            .iter()
            .zip(fix)
            .map(|(&w, f)| {
                let bounds = match f {
                    Fix::Free => (0.0, 1.0),
                    Fix::Zero => (0.0, 0.0),
                    Fix::One => (1.0, 1.0),
                };
                problem.add_var(w as f64, bounds)
            })
            .collect();
        let r = model.r() as f64;
        for i in 0..model.ell() {
            let expr: Vec<(Variable, f64)> = model.row(i).iter().map(|&(j, a)| (vars[j as usize], a as f64)).collect();
            problem.add_constraint(expr.as_slice(), ComparisonOp::Le, r);
        }
        let sol = problem.solve().ok()?;
        let relax = Relaxation { sol, vars };
        relax.objective().is_finite().then_some(relax)
    }

    pub(crate) fn fix(self, j: usize, one: bool) -> Option<Relaxation> {
        let var = self.vars[j];
        let sol = self.sol.fix_var(var, if one { 1.0 } else { 0.0 }).ok()?;
        let relax = Relaxation { sol, vars: self.vars };
        relax.objective().is_finite().then_some(relax)
    }

    pub(crate) fn objective(&self) -> f64 {
        self.sol.objective()
    }

    pub(crate) fn value(&self, j: usize) -> f64 {
        self.sol[self.vars[j]]
    }

    pub(crate) fn bound(&self) -> u64 {
        (self.objective() + BOUND_EPS).floor().max(0.0) as u64
    }
}

/// Integer bound from counting incidences.
///
/// Every point lies on `q+1` lines, so `w.x = sum_i L_i (A x)_i / (q+1)` where `L_i` are
/// the line-orbit lengths, and `(A x)_i` can reach at most `min(r, fixed load + free load)`.
/// Without line-orbit lengths only `fixed + free weight` is available.
pub(crate) fn combinatorial_bound(
    model: &IlpModel,
    fixed_obj: u64,
    free_weight: u64,
    loads: &[u32],
    free_load: &[u32],
) -> u64 {
    let simple = fixed_obj + free_weight;
    match &model.system().line_weights {
        Some(lw) => {
            let r = model.r();
            let total: u64 = lw
                .iter()
                .zip(loads.iter().zip(free_load))
                .map(|(&l, (&fixed, &free))| l * (fixed + free).min(r) as u64)
                .sum();
            simple.min(total / (model.system().q as u64 + 1))
        }
        None => simple,
    }
}

/// Upper bound on `w.x` over all completions of `fixed`, or `None` when the ones already
/// violate a constraint.
pub fn lp_bound(model: &IlpModel, fixed: &[Fix]) -> Option<u64> {
    assert_eq!(fixed.len(), model.ell(), "partial assignment has the wrong length");
    let ell = model.ell();
    let mut loads = vec![0u32; ell];
    let mut free_load = vec![0u32; ell];
    let (mut fixed_obj, mut free_weight) = (0u64, 0u64);
    for (j, f) in fixed.iter().enumerate() {
        let target = match f {
            Fix::One => {
                fixed_obj += model.weights()[j];
                &mut loads
            }
            Fix::Free => {
                free_weight += model.weights()[j];
                &mut free_load
            }
            Fix::Zero => continue,
        };
        for &(i, a) in model.col(j) {
            target[i as usize] += a;
        }
    }
    if loads.iter().any(|&l| l > model.r()) {
        return None;
    }
    let comb = combinatorial_bound(model, fixed_obj, free_weight, &loads, &free_load);
    match Relaxation::build(model, fixed) {
        Some(relax) => Some(comb.min(relax.bound())),
        None => Some(comb),
    }
}
