//! Branch and bound on the LP relaxation.
//!
//! Nodes are explored best-first (smallest parent bound), with depth-first
//! plunging below each popped node to find incumbents early. Branching picks
//! the most fractional integer column; integral nodes are re-solved with the
//! integers fixed ("polish") so reported incumbents carry exact integer
//! values. The search is deterministic: ties break on column index and node
//! age.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use libm::{ceil, floor, round};

use super::{
    solve_with_bounds, LpSolution, LpStatus, SolveError, GAP_DENOM_EPS, INTEGRALITY_TOL,
    MAX_MILP_INTEGERS,
};
use crate::formulation::{MilpModel, ObjSense};

pub const DEFAULT_NODE_LIMIT: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    /// Incumbent proven optimal within the requested relative gap.
    Optimal,
    Infeasible,
    /// Node limit reached before the gap closed; the incumbent, if any, is
    /// feasible but unproven.
    NodeLimit,
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Column values of the incumbent; empty when none was found.
    pub values: Vec<f64>,
    /// Incumbent objective in the model's sense; NaN without an incumbent.
    pub objective: f64,
    /// Best proven bound: a lower bound for minimization, an upper bound
    /// for maximization. NaN when the problem is infeasible.
    pub best_bound: f64,
    /// Relative gap between incumbent and bound at termination.
    pub gap: f64,
    pub nodes: usize,
    /// Total simplex iterations over all node solves.
    pub iterations: usize,
}

/// Open node: bounds of the subproblem plus the parent LP bound used as a
/// priority (a valid bound for the whole subtree).
struct Node {
    key: f64,
    seq: u64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Reversed so the max-heap pops the smallest bound, oldest node first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

pub fn solve_milp(
    model: &MilpModel,
    gap_target: f64,
    node_limit: usize,
) -> Result<MilpSolution, SolveError> {
    if !gap_target.is_finite() || gap_target <= 0.0 {
        return Err(SolveError::InvalidParameter(
            "gap_target must be positive and finite",
        ));
    }
    if node_limit == 0 {
        return Err(SolveError::InvalidParameter("node_limit must be positive"));
    }
    let int_cols: Vec<usize> = model
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.integral)
        .map(|(j, _)| j)
        .collect();
    if int_cols.len() > MAX_MILP_INTEGERS {
        return Err(SolveError::TooLarge {
            what: String::from("integer columns"),
            limit: MAX_MILP_INTEGERS,
            found: int_cols.len(),
        });
    }
    let sign = match model.sense {
        ObjSense::Minimize => 1.0,
        ObjSense::Maximize => -1.0,
    };

    let mut root_lower: Vec<f64> = model.columns.iter().map(|c| c.lower).collect();
    let mut root_upper: Vec<f64> = model.columns.iter().map(|c| c.upper).collect();
    for &j in &int_cols {
        if root_lower[j].is_finite() {
            root_lower[j] = ceil(root_lower[j] - INTEGRALITY_TOL);
        }
        if root_upper[j].is_finite() {
            root_upper[j] = floor(root_upper[j] + INTEGRALITY_TOL);
        }
    }

    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node {
        key: f64::NEG_INFINITY,
        seq,
        lower: root_lower,
        upper: root_upper,
    });
    seq += 1;

    let mut incumbent: Option<(Vec<f64>, f64)> = None; // values, minimize-key
    let mut pruned_min = f64::INFINITY;
    let mut nodes_used = 0usize;
    let mut total_iterations = 0usize;
    let mut limit_hit = false;

    'search: while let Some(node) = heap.pop() {
        if let Some((_, inc_key)) = incumbent {
            if node.key >= prune_threshold(inc_key, gap_target) {
                // Best-first order: every remaining open node is at least
                // as bad, so the whole frontier can be discarded at once.
                pruned_min = pruned_min.min(node.key);
                break;
            }
        }
        let mut current = Some((node.lower, node.upper, node.key));
        while let Some((lo, up, parent_key)) = current.take() {
            if nodes_used >= node_limit {
                limit_hit = true;
                pruned_min = pruned_min.min(parent_key);
                break 'search;
            }
            nodes_used += 1;
            let sol = solve_with_bounds(model, &lo, &up)?;
            total_iterations += sol.iterations;
            match sol.status {
                LpStatus::Infeasible => {}
                LpStatus::Unbounded => return Err(SolveError::UnboundedRelaxation),
                LpStatus::Optimal => {
                    let key = sign * sol.objective;
                    let prunable = incumbent
                        .as_ref()
                        .is_some_and(|&(_, ik)| key >= prune_threshold(ik, gap_target));
                    if prunable {
                        pruned_min = pruned_min.min(key);
                    } else if let Some(bj) = most_fractional(&sol.values, &int_cols) {
                        let v = sol.values[bj];
                        let split = floor(v);
                        let mut down_upper = up.clone();
                        down_upper[bj] = split;
                        let mut up_lower = lo.clone();
                        up_lower[bj] = split + 1.0;
                        let down = (lo, down_upper, key);
                        let upward = (up_lower, up, key);
                        // Plunge toward the nearer integer, queue the other
                        // side under the parent bound.
                        let (first, second) = if v - split >= 0.5 {
                            (upward, down)
                        } else {
                            (down, upward)
                        };
                        heap.push(Node {
                            key: second.2,
                            seq,
                            lower: second.0,
                            upper: second.1,
                        });
                        seq += 1;
                        current = Some(first);
                    } else {
                        let (values, objective) = if int_cols.is_empty() {
                            (sol.values, sol.objective)
                        } else {
                            polish(model, &lo, &up, &int_cols, sol, &mut total_iterations)?
                        };
                        let key = sign * objective;
                        if incumbent.as_ref().is_none_or(|&(_, ik)| key < ik) {
                            incumbent = Some((values, key));
                        }
                    }
                }
            }
        }
    }

    let open_min = heap
        .iter()
        .fold(f64::INFINITY, |acc, n| acc.min(n.key));
    Ok(match incumbent {
        Some((values, inc_key)) => {
            let bound_key = inc_key.min(pruned_min).min(open_min);
            MilpSolution {
                status: if limit_hit {
                    MilpStatus::NodeLimit
                } else {
                    MilpStatus::Optimal
                },
                values,
                objective: sign * inc_key,
                best_bound: sign * bound_key,
                gap: (inc_key - bound_key) / inc_key.abs().max(GAP_DENOM_EPS),
                nodes: nodes_used,
                iterations: total_iterations,
            }
        }
        None => {
            let bound_key = pruned_min.min(open_min);
            let (status, best_bound) = if limit_hit {
                (MilpStatus::NodeLimit, sign * bound_key)
            } else {
                (MilpStatus::Infeasible, f64::NAN)
            };
            MilpSolution {
                status,
                values: Vec::new(),
                objective: f64::NAN,
                best_bound,
                gap: f64::NAN,
                nodes: nodes_used,
                iterations: total_iterations,
            }
        }
    })
}

/// Minimize-key value above which a node cannot improve the incumbent by
/// more than the requested gap.
fn prune_threshold(inc_key: f64, gap_target: f64) -> f64 {
    inc_key - gap_target * inc_key.abs().max(GAP_DENOM_EPS)
}

/// Integer column farthest from its nearest integer, ties to the lowest
/// index; None when all are within tolerance.
fn most_fractional(values: &[f64], int_cols: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &j in int_cols {
        let dist = (values[j] - round(values[j])).abs();
        if dist > INTEGRALITY_TOL && best.is_none_or(|(_, d)| dist > d) {
            best = Some((j, dist));
        }
    }
    best.map(|(j, _)| j)
}

/// Re-solve with the integer columns fixed at their rounded values so the
/// incumbent carries exact integers and a consistent continuous part. Falls
/// back to the unpolished node solution if the fixed LP misbehaves
/// numerically.
fn polish(
    model: &MilpModel,
    lower: &[f64],
    upper: &[f64],
    int_cols: &[usize],
    node_sol: LpSolution,
    iterations: &mut usize,
) -> Result<(Vec<f64>, f64), SolveError> {
    let mut lo = lower.to_vec();
    let mut up = upper.to_vec();
    for &j in int_cols {
        let fixed = round(node_sol.values[j]);
        lo[j] = fixed;
        up[j] = fixed;
    }
    match solve_with_bounds(model, &lo, &up) {
        Ok(polished) => {
            *iterations += polished.iterations;
            if polished.status == LpStatus::Optimal {
                Ok((polished.values, polished.objective))
            } else {
                Ok((node_sol.values, node_sol.objective))
            }
        }
        Err(SolveError::FeasibilityCheck { .. }) => Ok((node_sol.values, node_sol.objective)),
        Err(other) => Err(other),
    }
}
