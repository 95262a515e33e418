//! Independent optimality checks.
//!
//! Two reference solvers that share no code with the simplex / branch-and-
//! bound stack: [`brute_force_optimum`] enumerates every investment plan and
//! prices each one through the operation LP, and [`lp_vertex_optimum`]
//! recovers an LP optimum by enumerating basis intersections directly. Both
//! are exponential and only meant for small cases, which is exactly what
//! makes them trustworthy as cross-checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::formulation::{plan_investment_cost, MilpModel, ObjSense, RowSense};
use crate::grid::NetworkCase;
use crate::operation::{evaluate_plan, EvaluateError, InvestmentPlan};
use crate::solver::FEASIBILITY_TOL;

/// Default ceiling on the number of plans the brute-force search will touch.
pub const DEFAULT_PLAN_CAP: usize = 4096;

/// Hard ceiling on the hyperplane subsets [`lp_vertex_optimum`] will visit.
const VERTEX_COMBINATION_CAP: u128 = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    /// The plan space is larger than the caller allowed.
    CapExceeded { plans: u128, cap: usize },
    /// Every plan in the space has an infeasible operation problem.
    NoFeasiblePlan,
    Evaluate(EvaluateError),
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OracleError::CapExceeded { plans, cap } => {
                write!(f, "plan space has {plans} plans, above the cap of {cap}")
            }
            OracleError::NoFeasiblePlan => f.write_str("no plan admits a feasible operation"),
            OracleError::Evaluate(e) => write!(f, "plan evaluation failed: {e}"),
        }
    }
}

/// Best plan found by exhaustive search, with its cost split.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanCost {
    pub plan: InvestmentPlan,
    /// Operation cost (generation plus shedding) of the plan.
    pub operation: f64,
    /// Investment cost of the plan's build events.
    pub investment: f64,
    pub total: f64,
}

/// Iterator over every investment plan of a case, in a fixed order.
///
/// Each candidate contributes one digit with `n_periods + 1` states: 0 means
/// never built, `d > 0` means built in period `d - 1`. Candidate lines come
/// before hydrogen routes and the last digit moves fastest, so the first
/// plan is the empty one.
pub struct PlanEnumeration {
    n_lines: usize,
    n_periods: usize,
    digits: Vec<usize>,
    done: bool,
}

impl PlanEnumeration {
    pub fn new(case: &NetworkCase) -> Self {
        PlanEnumeration {
            n_lines: case.candidate_lines.len(),
            n_periods: case.horizon.n_periods,
            digits: vec![0; case.candidate_lines.len() + case.hydrogen_routes.len()],
            done: false,
        }
    }

    /// Enumerate line decisions only; every route stays unbuilt.
    pub fn lines_only(case: &NetworkCase) -> Self {
        PlanEnumeration {
            n_lines: case.candidate_lines.len(),
            n_periods: case.horizon.n_periods,
            digits: vec![0; case.candidate_lines.len()],
            done: false,
        }
    }

    /// Exact size of the plan space, or `None` on overflow.
    pub fn checked_count(&self) -> Option<u128> {
        let radix = self.n_periods as u128 + 1;
        radix.checked_pow(self.digits.len() as u32)
    }

    /// Plan encoded by a digit vector this enumeration yielded.
    pub fn decode(&self, digits: &[usize], n_routes: usize) -> InvestmentPlan {
        let period = |d: usize| if d == 0 { None } else { Some(d - 1) };
        let lines: Vec<Option<usize>> =
            digits[..self.n_lines].iter().copied().map(period).collect();
        let mut routes: Vec<Option<usize>> =
            digits[self.n_lines..].iter().copied().map(period).collect();
        routes.resize(n_routes, None);
        InvestmentPlan::from_build_periods(&lines, &routes, self.n_periods)
    }

    fn advance(&mut self) {
        for d in self.digits.iter_mut().rev() {
            if *d < self.n_periods {
                *d += 1;
                return;
            }
            *d = 0;
        }
        self.done = true;
    }
}

impl Iterator for PlanEnumeration {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let digits = self.digits.clone();
        if self.digits.is_empty() {
            self.done = true;
        } else {
            self.advance();
        }
        Some(digits)
    }
}

fn search(
    case: &NetworkCase,
    mut plans: PlanEnumeration,
    n_routes: usize,
    cap: usize,
) -> Result<PlanCost, OracleError> {
    let plan_count = plans.checked_count().unwrap_or(u128::MAX);
    if plan_count > cap as u128 {
        return Err(OracleError::CapExceeded {
            plans: plan_count,
            cap,
        });
    }

    let mut best: Option<PlanCost> = None;
    while let Some(digits) = plans.next() {
        let plan = plans.decode(&digits, n_routes);
        let result = match evaluate_plan(case, &plan) {
            Ok(r) => r,
            Err(EvaluateError::Infeasible) => continue,
            Err(e) => return Err(OracleError::Evaluate(e)),
        };
        let investment = plan_investment_cost(case, &plan);
        let total = result.objective + investment;
        // Strict comparison keeps the first plan of a tie, which the digit
        // order makes the one with the fewest/latest builds.
        if best.as_ref().is_none_or(|b| total < b.total) {
            best = Some(PlanCost {
                plan,
                operation: result.objective,
                investment,
                total,
            });
        }
    }
    best.ok_or(OracleError::NoFeasiblePlan)
}

/// Exhaustive optimum over all line and route plans.
///
/// Rejects cases whose plan space exceeds `cap` rather than silently running
/// for hours; [`DEFAULT_PLAN_CAP`] is a sensible limit.
pub fn brute_force_optimum(case: &NetworkCase, cap: usize) -> Result<PlanCost, OracleError> {
    let n_routes = case.hydrogen_routes.len();
    search(case, PlanEnumeration::new(case), n_routes, cap)
}

/// Exhaustive optimum with hydrogen excluded: only line plans are explored
/// and every route stays offline, which matches the lines-only benchmark
/// because offline routes have all their columns fixed at zero.
pub fn brute_force_optimum_lines_only(
    case: &NetworkCase,
    cap: usize,
) -> Result<PlanCost, OracleError> {
    let n_routes = case.hydrogen_routes.len();
    search(case, PlanEnumeration::lines_only(case), n_routes, cap)
}

/// Solve an `n`-square linear system in place by Gaussian elimination with
/// partial pivoting. Returns `None` when the matrix is singular.
fn solve_square(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if fabs(a[r * n + col]) > fabs(a[piv * n + col]) {
                piv = r;
            }
        }
        if fabs(a[piv * n + col]) < 1e-11 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i * n + i]).collect())
}

fn fabs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

/// One hyperplane of the feasible polytope: a row at equality or a variable
/// pinned to a finite bound.
struct Plane {
    coeffs: Vec<(usize, f64)>,
    rhs: f64,
}

/// LP optimum by vertex enumeration, independent of the simplex code.
///
/// Collects every constraint hyperplane (rows at equality, finite variable
/// bounds), intersects each subset of `n` of them, and keeps the best
/// feasible intersection point. Only valid when the optimum sits on a vertex,
/// i.e. when the feasible set is pointed — every variable bounded in a box
/// suffices. Returns `None` when no feasible vertex exists or the subset
/// count exceeds an internal safety cap.
pub fn lp_vertex_optimum(model: &MilpModel) -> Option<f64> {
    let n = model.columns.len();
    if n == 0 {
        let feasible = model
            .rows
            .iter()
            .all(|row| match row.sense {
                RowSense::Le => 0.0 <= row.rhs + FEASIBILITY_TOL,
                RowSense::Ge => 0.0 >= row.rhs - FEASIBILITY_TOL,
                RowSense::Eq => fabs(row.rhs) <= FEASIBILITY_TOL,
            });
        return feasible.then_some(model.objective_offset);
    }

    let mut planes: Vec<Plane> = Vec::new();
    for row in &model.rows {
        planes.push(Plane {
            coeffs: row.coeffs.clone(),
            rhs: row.rhs,
        });
    }
    for (j, c) in model.columns.iter().enumerate() {
        if c.lower.is_finite() {
            planes.push(Plane {
                coeffs: vec![(j, 1.0)],
                rhs: c.lower,
            });
        }
        if c.upper.is_finite() && c.upper != c.lower {
            planes.push(Plane {
                coeffs: vec![(j, 1.0)],
                rhs: c.upper,
            });
        }
    }
    if planes.len() < n {
        return None;
    }
    if combinations(planes.len(), n)? > VERTEX_COMBINATION_CAP {
        return None;
    }

    let feasible = |x: &[f64]| {
        for (j, c) in model.columns.iter().enumerate() {
            if x[j] < c.lower - FEASIBILITY_TOL || x[j] > c.upper + FEASIBILITY_TOL {
                return false;
            }
        }
        model.rows.iter().all(|row| {
            let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            match row.sense {
                RowSense::Le => lhs <= row.rhs + FEASIBILITY_TOL,
                RowSense::Ge => lhs >= row.rhs - FEASIBILITY_TOL,
                RowSense::Eq => fabs(lhs - row.rhs) <= FEASIBILITY_TOL,
            }
        })
    };

    let mut best: Option<f64> = None;
    // First n-subset in lexicographic order; next_combination walks the rest.
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        for (r, &pi) in pick.iter().enumerate() {
            for &(j, v) in &planes[pi].coeffs {
                a[r * n + j] += v;
            }
            b[r] = planes[pi].rhs;
        }
        if let Some(x) = solve_square(&mut a, &mut b, n) {
            if feasible(&x) {
                let obj = model.objective_value(&x);
                let better = match (best, model.sense) {
                    (None, _) => true,
                    (Some(cur), ObjSense::Minimize) => obj < cur,
                    (Some(cur), ObjSense::Maximize) => obj > cur,
                };
                if better {
                    best = Some(obj);
                }
            }
        }
        if !next_combination(&mut pick, planes.len()) {
            break;
        }
    }
    best
}

/// Binomial coefficient, `None` on overflow.
fn combinations(n: usize, k: usize) -> Option<u128> {
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.checked_mul((n - i) as u128)?;
        out /= (i + 1) as u128;
    }
    Some(out)
}

/// Advance `pick` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
