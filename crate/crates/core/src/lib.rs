//! Online optimization with switching costs.
//!
//! The crate implements Synchronized Fixed Horizon Control (the `SFHC(h)`
//! subroutines, their deterministic average and two randomized variants),
//! the greedy and AFHC baselines, exact or brute-force offline oracles,
//! analytic cost families with known order-of-growth and triangle constants,
//! a semi-adaptive adversary game, and the convex body chasing reductions.
//!
//! Everything operates on immutable [`model::Instance`] values and returns
//! [`model::Trajectory`] records whose per-step costs can be re-evaluated
//! independently with [`model::evaluate_total_cost`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bounds;
pub mod error;
pub mod exec;
pub mod families;
pub mod game;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod schema;
pub mod window;

pub use error::{Error, Result};
pub use model::{
    competitive_ratio, evaluate_total_cost, HittingCost, Instance, MovementCost, NormOrder, Point,
    Trajectory,
};
