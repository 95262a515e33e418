//! Core planning toolkit for co-expansion of electric transmission and
//! hydrogen transport routes.
//!
//! The crate is `no_std` (with `alloc`) and carries no IO: cases come in as
//! [`grid::NetworkCase`] values, models go out as [`formulation::MilpModel`]
//! values, and everything in between — the bounded-simplex/branch-and-bound
//! solver, the fixed-plan operation evaluator, the brute-force optimality
//! oracle, and the scenario sweep — is pure computation.
//!
//! Modules:
//! - [`grid`]: domain types, case validation, scenario transforms
//! - [`formulation`]: MILP assembly for the planning and operation models
//! - [`solver`]: bounded simplex, branch and bound, MPS interchange
//! - [`operation`]: fixed-plan dispatch evaluation and physics checks
//! - [`oracle`]: exhaustive plan enumeration for small cases
//! - [`scenario`]: parameter sweeps over penetration, round trip and cost

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(any(test, feature = "fixtures"))]
pub mod fixtures;

pub mod formulation;
pub mod grid;
pub mod operation;
pub mod oracle;
pub mod scenario;
pub mod solver;
