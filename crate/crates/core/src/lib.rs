//! Solvers for single-machine scheduling with joint replenishment,
//! `1|jrp, r_j|c_S + c_Q`.
//!
//! A job may start only once every resource it needs has been ordered at
//! some moment between its release date and its start. Each order event
//! pays a joint cost `K_0` plus `K_i` for every resource type it includes.
//!
//! * [`model`] and [`eval`]: instances, solutions, exact costing and feasibility.
//! * [`oracle`]: brute-force optimum used as ground truth.
//! * [`dp`]: polynomial-time offline algorithms for special cases.
//! * [`online`]: irrevocable-decision simulator, online policies and adversaries.
//! * [`bounds`]: offline lower bounds and lower-bound ratio curves.
//! * [`generate`]: seeded instance families.

pub mod bounds;
pub mod dp;
pub mod error;
pub mod eval;
pub mod exec;
pub mod generate;
pub mod model;
pub mod online;
pub mod oracle;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{
    parse_instance, Cost, Instance, Job, JobId, Objective, Replenishment, ReplenishmentStructure,
    ResourceSet, Schedule, Solution, SolutionDoc, Time,
};
