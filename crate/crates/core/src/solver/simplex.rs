//! Bounded-variable primal simplex with an explicit dense basis inverse.
//!
//! Standard form: every row gets a slack column whose bounds encode the
//! sense (`<=`: [0, inf), `>=`: (-inf, 0], `=`: [0, 0]), giving
//! `A x + s = b` with `l <= x <= u`. Phase 1 starts from the slack basis
//! and adds artificial columns for rows whose slack would start outside
//! its bounds, then minimizes the artificial sum. The basis inverse is
//! updated by Gauss-Jordan pivots and rebuilt from scratch periodically to
//! bound drift.

use alloc::vec;
use alloc::vec::Vec;

use super::{LpSolution, LpStatus, SolveError, FEASIBILITY_TOL};
use crate::formulation::{MilpModel, ObjSense, RowSense};

/// Smallest pivot magnitude accepted in the ratio test.
const PIVOT_TOL: f64 = 1e-9;
/// Reduced-cost threshold for entering candidates.
const DJ_TOL: f64 = 1e-9;
/// Degenerate (zero-step) pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 64;
/// Pivots between full refactorizations of the basis inverse.
const REFACTOR_INTERVAL: usize = 100;

pub fn solve_lp(model: &MilpModel) -> Result<LpSolution, SolveError> {
    let lower: Vec<f64> = model.columns.iter().map(|c| c.lower).collect();
    let upper: Vec<f64> = model.columns.iter().map(|c| c.upper).collect();
    solve_with_bounds(model, &lower, &upper)
}

/// Solve with overridden structural bounds (used by branch and bound to
/// avoid cloning the model per node).
pub(crate) fn solve_with_bounds(
    model: &MilpModel,
    lower: &[f64],
    upper: &[f64],
) -> Result<LpSolution, SolveError> {
    debug_assert_eq!(lower.len(), model.columns.len());
    debug_assert_eq!(upper.len(), model.columns.len());
    if lower.iter().zip(upper).any(|(&l, &u)| l > u) {
        return Ok(infeasible(0));
    }

    let mut t = Tableau::new(model, lower, upper);
    if !t.phase1()? {
        return Ok(infeasible(t.iterations));
    }
    match t.phase2()? {
        LoopEnd::Optimal => {}
        LoopEnd::Unbounded => {
            let objective = match model.sense {
                ObjSense::Minimize => f64::NEG_INFINITY,
                ObjSense::Maximize => f64::INFINITY,
            };
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                values: Vec::new(),
                objective,
                iterations: t.iterations,
            });
        }
    }

    // Rebuild the inverse and basic values once more for an accurate point,
    // then certify it against the original model.
    t.refactorize()?;
    let values = t.structural_values();
    let violation = max_violation_with_bounds(model, lower, upper, &values);
    if violation > FEASIBILITY_TOL {
        return Err(SolveError::FeasibilityCheck { violation });
    }
    let objective = model.objective_value(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
        iterations: t.iterations,
    })
}

fn infeasible(iterations: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        objective: f64::NAN,
        iterations,
    }
}

/// Bound/row violation against possibly overridden structural bounds.
fn max_violation_with_bounds(
    model: &MilpModel,
    lower: &[f64],
    upper: &[f64],
    values: &[f64],
) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..values.len() {
        worst = worst.max(lower[j] - values[j]).max(values[j] - upper[j]);
    }
    for (i, row) in model.rows.iter().enumerate() {
        let act = model.row_activity(i, values);
        let v = match row.sense {
            RowSense::Le => act - row.rhs,
            RowSense::Ge => row.rhs - act,
            RowSense::Eq => (act - row.rhs).abs(),
        };
        worst = worst.max(v);
    }
    worst
}

#[derive(Clone, Copy, PartialEq)]
enum VStat {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic with both bounds infinite, parked at zero.
    Free,
}

enum LoopEnd {
    Optimal,
    Unbounded,
}

enum Step {
    Unbounded,
    /// Entering variable travels to its opposite bound; no basis change.
    BoundFlip { t: f64 },
    /// Basis change: leaving row, step length, whether the leaving variable
    /// stops at its upper bound.
    Pivot { row: usize, t: f64, to_upper: bool },
}

struct Tableau {
    m: usize,
    n_struct: usize,
    /// Column-major coefficients for structural, slack and artificial
    /// columns, each sorted by row with duplicates merged.
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    up: Vec<f64>,
    /// Phase-2 cost, sign-flipped for maximization.
    cost: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    stat: Vec<VStat>,
    xb: Vec<f64>,
    /// Dense m*m basis inverse, row-major.
    binv: Vec<f64>,
    iterations: usize,
    pivots_since_refactor: usize,
    n_artificial: usize,
}

impl Tableau {
    fn new(model: &MilpModel, lower: &[f64], upper: &[f64]) -> Self {
        let m = model.rows.len();
        let n_struct = model.columns.len();
        let sign = match model.sense {
            ObjSense::Minimize => 1.0,
            ObjSense::Maximize => -1.0,
        };

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_struct + m];
        for (i, row) in model.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                cols[j].push((i, a));
            }
        }
        for col in cols.iter_mut().take(n_struct) {
            col.sort_unstable_by_key(|&(i, _)| i);
            col.dedup_by(|later, earlier| {
                if later.0 == earlier.0 {
                    earlier.1 += later.1;
                    true
                } else {
                    false
                }
            });
        }

        let mut lo: Vec<f64> = lower.to_vec();
        let mut up: Vec<f64> = upper.to_vec();
        let mut cost: Vec<f64> = model.columns.iter().map(|c| sign * c.objective).collect();
        for (i, row) in model.rows.iter().enumerate() {
            cols[n_struct + i].push((i, 1.0));
            let (sl, su) = match row.sense {
                RowSense::Le => (0.0, f64::INFINITY),
                RowSense::Ge => (f64::NEG_INFINITY, 0.0),
                RowSense::Eq => (0.0, 0.0),
            };
            lo.push(sl);
            up.push(su);
            cost.push(0.0);
        }

        Tableau {
            m,
            n_struct,
            cols,
            lo,
            up,
            cost,
            b: model.rows.iter().map(|r| r.rhs).collect(),
            basis: Vec::new(),
            stat: Vec::new(),
            xb: vec![0.0; m],
            binv: identity(m),
            iterations: 0,
            pivots_since_refactor: 0,
            n_artificial: 0,
        }
    }

    /// Nonbasic resting value of a column.
    fn nb_value(&self, j: usize) -> f64 {
        match self.stat[j] {
            VStat::Basic(r) => self.xb[r],
            VStat::AtLower => self.lo[j],
            VStat::AtUpper => self.up[j],
            VStat::Free => 0.0,
        }
    }

    /// Install the slack basis, adding artificial columns for rows whose
    /// slack starts outside its bounds. Returns false if phase 1 proves the
    /// problem infeasible.
    fn phase1(&mut self) -> Result<bool, SolveError> {
        let n = self.cols.len();
        self.stat = (0..n)
            .map(|j| {
                if self.lo[j].is_finite() {
                    VStat::AtLower
                } else if self.up[j].is_finite() {
                    VStat::AtUpper
                } else {
                    VStat::Free
                }
            })
            .collect();
        self.basis = (0..self.m).map(|i| self.n_struct + i).collect();

        // Activity of the structural columns at their resting values.
        let mut activity = vec![0.0; self.m];
        for j in 0..self.n_struct {
            let v = self.nb_value(j);
            if v != 0.0 {
                for &(i, a) in &self.cols[j] {
                    activity[i] += a * v;
                }
            }
        }

        let mut phase1_cost = vec![0.0; n];
        for (i, &act) in activity.iter().enumerate() {
            let slack = self.n_struct + i;
            let want = self.b[i] - act;
            if want >= self.lo[slack] - FEASIBILITY_TOL && want <= self.up[slack] + FEASIBILITY_TOL
            {
                self.stat[slack] = VStat::Basic(i);
                self.xb[i] = want;
                continue;
            }
            // Park the slack at its nearest bound and cover the residual
            // with an artificial column.
            let parked = if want < self.lo[slack] {
                self.stat[slack] = VStat::AtLower;
                self.lo[slack]
            } else {
                self.stat[slack] = VStat::AtUpper;
                self.up[slack]
            };
            let residual = want - parked;
            let sigma = if residual > 0.0 { 1.0 } else { -1.0 };
            let art = self.cols.len();
            self.cols.push(vec![(i, sigma)]);
            self.lo.push(0.0);
            self.up.push(f64::INFINITY);
            self.cost.push(0.0);
            phase1_cost.push(1.0);
            self.stat.push(VStat::Basic(i));
            self.basis[i] = art;
            self.xb[i] = residual * sigma;
            self.n_artificial += 1;
        }

        if self.n_artificial == 0 {
            return Ok(true);
        }
        // Artificials with negative orientation leave the starting basis
        // different from the identity; sync the inverse before iterating.
        self.refactorize()?;
        match self.optimize(&phase1_cost)? {
            LoopEnd::Unbounded => Err(SolveError::SingularBasis),
            LoopEnd::Optimal => {
                let infeas: f64 = (self.n_struct + self.m..self.cols.len())
                    .map(|j| self.nb_value(j))
                    .sum();
                let scale = 1.0 + self.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
                if infeas > FEASIBILITY_TOL * scale {
                    return Ok(false);
                }
                // Freeze the artificials at zero for phase 2.
                for j in self.n_struct + self.m..self.cols.len() {
                    self.lo[j] = 0.0;
                    self.up[j] = 0.0;
                }
                Ok(true)
            }
        }
    }

    fn phase2(&mut self) -> Result<LoopEnd, SolveError> {
        let cost = self.cost.clone();
        self.optimize(&cost)
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<LoopEnd, SolveError> {
        let limit = 50 * (self.m + self.cols.len()) + 1000;
        let mut stall = 0usize;
        let mut bland = false;
        let mut last_obj = f64::INFINITY;
        loop {
            if self.iterations > limit {
                return Err(SolveError::IterationLimit {
                    iterations: self.iterations,
                });
            }
            self.iterations += 1;
            if self.pivots_since_refactor >= REFACTOR_INTERVAL {
                self.refactorize()?;
            }

            let y = self.duals(cost);
            let Some((j, dir)) = self.choose_entering(cost, &y, bland) else {
                return Ok(LoopEnd::Optimal);
            };
            let w = self.ftran(j);
            match self.ratio_test(j, dir, &w) {
                Step::Unbounded => return Ok(LoopEnd::Unbounded),
                Step::BoundFlip { t } => {
                    for (x, &wi) in self.xb.iter_mut().zip(&w) {
                        *x -= dir * wi * t;
                    }
                    self.stat[j] = match self.stat[j] {
                        VStat::AtLower => VStat::AtUpper,
                        VStat::AtUpper => VStat::AtLower,
                        other => other,
                    };
                }
                Step::Pivot { row, t, to_upper } => {
                    let entering_value = self.nb_value(j) + dir * t;
                    let leaving = self.basis[row];
                    for (x, &wi) in self.xb.iter_mut().zip(&w) {
                        *x -= dir * wi * t;
                    }
                    self.stat[leaving] = if to_upper { VStat::AtUpper } else { VStat::AtLower };
                    self.basis[row] = j;
                    self.stat[j] = VStat::Basic(row);
                    self.xb[row] = entering_value;
                    self.update_inverse(row, &w)?;
                    self.pivots_since_refactor += 1;
                }
            }

            let obj = self.phase_objective(cost);
            if obj < last_obj - 1e-10 * (1.0 + last_obj.abs().min(1e30)) {
                stall = 0;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
            last_obj = obj;
        }
    }

    fn phase_objective(&self, cost: &[f64]) -> f64 {
        (0..self.cols.len())
            .map(|j| cost[j] * self.nb_value(j))
            .sum()
    }

    /// y = c_B^T B^-1.
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &q) in self.basis.iter().enumerate() {
            let cb = cost[q];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for k in 0..m {
                    y[k] += cb * row[k];
                }
            }
        }
        y
    }

    /// Entering column and travel direction (+1 up from lower / -1 down
    /// from upper), Dantzig pricing unless Bland's rule is active.
    fn choose_entering(&self, cost: &[f64], y: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (j, col) in self.cols.iter().enumerate() {
            if matches!(self.stat[j], VStat::Basic(_)) || self.lo[j] >= self.up[j] {
                continue;
            }
            let dj = cost[j] - col.iter().map(|&(i, a)| y[i] * a).sum::<f64>();
            let (eligible, dir, score) = match self.stat[j] {
                VStat::AtLower => (dj < -DJ_TOL, 1.0, -dj),
                VStat::AtUpper => (dj > DJ_TOL, -1.0, dj),
                VStat::Free => (dj.abs() > DJ_TOL, if dj < 0.0 { 1.0 } else { -1.0 }, dj.abs()),
                VStat::Basic(_) => unreachable!(),
            };
            if !eligible {
                continue;
            }
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// w = B^-1 a_j.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        for &(i, a) in &self.cols[j] {
            for (r, wr) in w.iter_mut().enumerate() {
                *wr += self.binv[r * m + i] * a;
            }
        }
        w
    }

    fn ratio_test(&self, j: usize, dir: f64, w: &[f64]) -> Step {
        let own = self.up[j] - self.lo[j]; // infinite for free columns
        let mut t_row = f64::INFINITY;
        let mut row = usize::MAX;
        let mut to_upper = false;
        for (i, &wi) in w.iter().enumerate() {
            let q = self.basis[i];
            let delta = dir * wi;
            if delta > PIVOT_TOL && self.lo[q].is_finite() {
                let limit = ((self.xb[i] - self.lo[q]) / delta).max(0.0);
                if limit < t_row - 1e-12 || (limit < t_row + 1e-12 && row != usize::MAX && q < self.basis[row]) {
                    t_row = limit;
                    row = i;
                    to_upper = false;
                }
            } else if delta < -PIVOT_TOL && self.up[q].is_finite() {
                let limit = ((self.up[q] - self.xb[i]) / -delta).max(0.0);
                if limit < t_row - 1e-12 || (limit < t_row + 1e-12 && row != usize::MAX && q < self.basis[row]) {
                    t_row = limit;
                    row = i;
                    to_upper = true;
                }
            }
        }
        if own <= t_row {
            if own.is_infinite() {
                return Step::Unbounded;
            }
            return Step::BoundFlip { t: own };
        }
        if row == usize::MAX {
            return Step::Unbounded;
        }
        Step::Pivot {
            row,
            t: t_row,
            to_upper,
        }
    }

    /// Gauss-Jordan update of the inverse after column `basis[row]` was
    /// replaced; `w` is the pivot column in the old basis frame.
    fn update_inverse(&mut self, row: usize, w: &[f64]) -> Result<(), SolveError> {
        let m = self.m;
        let piv = w[row];
        if piv.abs() < PIVOT_TOL {
            return Err(SolveError::SingularBasis);
        }
        let inv = 1.0 / piv;
        for k in 0..m {
            self.binv[row * m + k] *= inv;
        }
        for (i, &f) in w.iter().enumerate() {
            if i == row || f == 0.0 {
                continue;
            }
            for k in 0..m {
                self.binv[i * m + k] -= f * self.binv[row * m + k];
            }
        }
        Ok(())
    }

    /// Rebuild the inverse from the basis columns and recompute the basic
    /// values from the nonbasic resting point.
    fn refactorize(&mut self) -> Result<(), SolveError> {
        let m = self.m;
        let mut bmat = vec![0.0; m * m];
        for (col_pos, &j) in self.basis.iter().enumerate() {
            for &(i, a) in &self.cols[j] {
                bmat[i * m + col_pos] = a;
            }
        }
        self.binv = invert(&mut bmat, m).ok_or(SolveError::SingularBasis)?;

        let mut rhs = self.b.clone();
        for j in 0..self.cols.len() {
            if matches!(self.stat[j], VStat::Basic(_)) {
                continue;
            }
            let v = self.nb_value(j);
            if v != 0.0 {
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * v;
                }
            }
        }
        for (r, x) in self.xb.iter_mut().enumerate() {
            *x = self.binv[r * m..(r + 1) * m]
                .iter()
                .zip(&rhs)
                .map(|(&c, &v)| c * v)
                .sum();
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    fn structural_values(&self) -> Vec<f64> {
        (0..self.n_struct).map(|j| self.nb_value(j)).collect()
    }
}

fn identity(m: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        out[i * m + i] = 1.0;
    }
    out
}

/// Dense Gauss-Jordan inversion with partial pivoting; `a` is destroyed.
fn invert(a: &mut [f64], m: usize) -> Option<Vec<f64>> {
    let mut inv = identity(m);
    for col in 0..m {
        let mut piv_row = col;
        let mut piv_val = a[col * m + col].abs();
        for r in col + 1..m {
            let v = a[r * m + col].abs();
            if v > piv_val {
                piv_val = v;
                piv_row = r;
            }
        }
        if piv_val < 1e-12 {
            return None;
        }
        if piv_row != col {
            for k in 0..m {
                a.swap(col * m + k, piv_row * m + k);
                inv.swap(col * m + k, piv_row * m + k);
            }
        }
        let piv = a[col * m + col];
        let inv_piv = 1.0 / piv;
        for k in 0..m {
            a[col * m + k] *= inv_piv;
            inv[col * m + k] *= inv_piv;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = a[r * m + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..m {
                a[r * m + k] -= f * a[col * m + k];
                inv[r * m + k] -= f * inv[col * m + k];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulation::{MilpModel, ObjSense, RowSense};

    fn simple_model(sense: ObjSense) -> MilpModel {
        MilpModel::new("t", sense)
    }

    #[test]
    fn maximize_single_bounded_variable() {
        let mut m = simple_model(ObjSense::Maximize);
        m.add_column("x".into(), 0.0, f64::INFINITY, 1.0, false);
        m.add_row("cap".into(), vec![(0, 1.0)], RowSense::Le, 5.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 5.0).abs() < 1e-9);
        assert!((sol.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn facet_optimum_objective() {
        // min -x - y s.t. x + y <= 1, x, y in [0, 1]: objective -1 anywhere
        // on the facet.
        let mut m = simple_model(ObjSense::Minimize);
        m.add_column("x".into(), 0.0, 1.0, -1.0, false);
        m.add_column("y".into(), 0.0, 1.0, -1.0, false);
        m.add_row("cap".into(), vec![(0, 1.0), (1, 1.0)], RowSense::Le, 1.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - (-1.0)).abs() < 1e-9);
    }

    #[test]
    fn equality_requires_phase1() {
        // min x + y s.t. x + y = 2, 2x - y = 1 -> x = 1, y = 1.
        let mut m = simple_model(ObjSense::Minimize);
        m.add_column("x".into(), 0.0, f64::INFINITY, 1.0, false);
        m.add_column("y".into(), 0.0, f64::INFINITY, 1.0, false);
        m.add_row("s".into(), vec![(0, 1.0), (1, 1.0)], RowSense::Eq, 2.0);
        m.add_row("d".into(), vec![(0, 2.0), (1, -1.0)], RowSense::Eq, 1.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 1.0).abs() < 1e-8);
        assert!((sol.values[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn detects_infeasible() {
        let mut m = simple_model(ObjSense::Minimize);
        m.add_column("x".into(), 0.0, 1.0, 1.0, false);
        m.add_row("hi".into(), vec![(0, 1.0)], RowSense::Ge, 2.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut m = simple_model(ObjSense::Minimize);
        m.add_column("x".into(), 0.0, f64::INFINITY, -1.0, false);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(sol.objective, f64::NEG_INFINITY);
    }

    #[test]
    fn negative_lower_bounds_and_ge_rows() {
        // min x + 2y s.t. x + y >= -1, x in [-3, 3], y in [-2, 2]
        // optimum: y = -2 forces x >= 1; x = 1 -> obj = -3.
        let mut m = simple_model(ObjSense::Minimize);
        m.add_column("x".into(), -3.0, 3.0, 1.0, false);
        m.add_column("y".into(), -2.0, 2.0, 2.0, false);
        m.add_row("r".into(), vec![(0, 1.0), (1, 1.0)], RowSense::Ge, -1.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - (-3.0)).abs() < 1e-8, "{}", sol.objective);
    }

    #[test]
    fn fixed_columns_never_move() {
        let mut m = simple_model(ObjSense::Minimize);
        m.add_column("x".into(), 2.0, 2.0, -10.0, false);
        m.add_column("y".into(), 0.0, 5.0, 1.0, false);
        m.add_row("r".into(), vec![(0, 1.0), (1, 1.0)], RowSense::Ge, 3.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.values[0], 2.0);
        assert!((sol.values[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn crossing_bounds_is_infeasible() {
        let mut m = simple_model(ObjSense::Minimize);
        m.add_column("x".into(), 1.0, 0.0, 1.0, false);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn objective_offset_is_applied() {
        let mut m = simple_model(ObjSense::Minimize);
        m.objective_offset = 10.0;
        m.add_column("x".into(), 0.0, 4.0, 1.0, false);
        m.add_row("r".into(), vec![(0, 1.0)], RowSense::Ge, 3.0);
        let sol = solve_lp(&m).unwrap();
        assert!((sol.objective - 13.0).abs() < 1e-9);
    }
}
