//! Construction, verification and automorphism exclusion for `(n,r)`-arcs in PG(2,q).
//!
//! A point set of PG(2,q) is an `(n,r)`-arc when it has `n` points, every line meets it in
//! at most `r` points and some line in exactly `r`. Prescribing a group of collineations
//! reduces the search for large arcs to a small 0/1 program over the group's orbits
//! ([`condense`], [`solver`]). For prime `q`, running that program for every cyclic
//! subgroup class ([`classify`]) shows which automorphism groups an arc with given
//! parameters can still have.

pub mod arcs;
pub mod classify;
pub mod cli;
pub mod condense;
pub mod error;
pub mod geometry;
pub mod gf;
pub mod group;
pub mod matrix;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
