//! Exhaustive enumeration of all `2^ell` selections, in Gray-code order.

use std::time::Instant;

use super::{IlpModel, Solution, Status};
use crate::error::{Error, Result};

pub const ORACLE_MAX_ELL: usize = 25;

pub fn exhaustive_oracle(model: &IlpModel) -> Result<Solution> {
    let ell = model.ell();
    if ell > ORACLE_MAX_ELL {
        return Err(Error::Budget(format!(
            "exhaustive oracle limited to {ORACLE_MAX_ELL} variables, model has {ell}"
        )));
    }
    let start = Instant::now();
    let r = model.r();
    let w = model.weights();
    let mut loads = vec![0u32; ell];
    let mut violated = 0usize;
    let mut obj = 0u64;
    let mut mask = 0u32;
    let (mut best_obj, mut best_mask) = (0u64, 0u32);

    for k in 1u64..(1u64 << ell) {
        let j = k.trailing_zeros() as usize;
        mask ^= 1 << j;
        let adding = mask & (1 << j) != 0;
        for &(i, a) in model.col(j) {
            let l = &mut loads[i as usize];
            let before = *l > r;
            if adding {
                *l += a;
            } else {
                *l -= a;
            }
            let after = *l > r;
            match (before, after) {
                (false, true) => violated += 1,
                (true, false) => violated -= 1,
                _ => {}
            }
        }
        if adding {
            obj += w[j];
        } else {
            obj -= w[j];
        }
        if violated == 0 && obj > best_obj {
            best_obj = obj;
            best_mask = mask;
        }
    }

    let x: Vec<bool> = (0..ell).map(|j| best_mask & (1 << j) != 0).collect();
    Ok(Solution {
        objective: best_obj,
        x,
        status: Status::Optimal,
        nodes_explored: 1u64 << ell,
        wall_time: start.elapsed(),
        root_bound: best_obj,
        incumbent_trace: Vec::new(),
    })
}
