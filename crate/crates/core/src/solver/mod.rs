//! Self-contained LP/MILP solving for desk-scale instances.
//!
//! [`solve_lp`] is a bounded-variable primal simplex with an explicit dense
//! basis inverse, two-phase start, Dantzig pricing and Bland's rule after
//! stall detection. [`solve_milp`] wraps it in a best-first branch-and-bound
//! with depth-first plunging. [`write_mps`] / [`parse_mps`] translate models
//! to and from fixed-format MPS text for external industrial solvers.
//!
//! Tolerances follow per-unit scaling (coefficients near 1, so absolute
//! tolerances are safe): feasibility 1e-7, integrality 1e-6, relative
//! optimality gap 1e-3 by default.

mod branch_bound;
mod mps;
mod simplex;

pub use branch_bound::{solve_milp, MilpSolution, MilpStatus, DEFAULT_NODE_LIMIT};
pub use mps::{parse_mps, write_mps, MpsError};
pub use simplex::solve_lp;
pub(crate) use simplex::solve_with_bounds;

use alloc::string::String;
use alloc::vec::Vec;

/// Absolute bound/row feasibility tolerance (per-unit scale).
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Distance from the nearest integer below which a value counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Default relative optimality gap for branch and bound.
pub const DEFAULT_GAP: f64 = 1e-3;
/// Floor for the denominator of the relative gap.
pub const GAP_DENOM_EPS: f64 = 1e-9;
/// The built-in branch and bound refuses instances with more integer
/// columns than this; export the model as MPS for an industrial solver.
pub const MAX_MILP_INTEGERS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of one LP solve. For `Infeasible` the values are empty and the
/// objective is NaN; for `Unbounded` the objective is the appropriate
/// infinity for the model's sense.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Numerical or resource failure inside the solver. Never silent: every
/// variant carries enough context to report.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    IterationLimit { iterations: usize },
    SingularBasis,
    /// The final point failed the independent feasibility re-check.
    FeasibilityCheck { violation: f64 },
    /// The MILP relaxation is unbounded, so no branching bound exists.
    UnboundedRelaxation,
    /// Instance exceeds the desk-scale limits of the built-in solver.
    TooLarge { what: String, limit: usize, found: usize },
    InvalidParameter(&'static str),
}

impl core::fmt::Display for SolveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolveError::IterationLimit { iterations } => {
                write!(f, "simplex iteration limit reached after {iterations} pivots")
            }
            SolveError::SingularBasis => write!(f, "basis matrix is numerically singular"),
            SolveError::FeasibilityCheck { violation } => write!(
                f,
                "solution failed the independent feasibility re-check (violation {violation:e})"
            ),
            SolveError::UnboundedRelaxation => {
                write!(f, "LP relaxation is unbounded; cannot bound the search tree")
            }
            SolveError::TooLarge { what, limit, found } => write!(
                f,
                "instance too large for the built-in solver ({what}: {found} > {limit}); \
                 export the model as MPS and use an industrial solver"
            ),
            SolveError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}
