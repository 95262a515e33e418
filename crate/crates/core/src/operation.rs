//! Investment plans and fixed-plan operation.
//!
//! An [`InvestmentPlan`] freezes the binary decisions of the planning model:
//! per candidate line and per hydrogen route, in which period (if any) it is
//! built and from when it is online. [`evaluate_plan`] prices the operation
//! of a frozen plan by solving the dispatch LP and unpacks the solution into
//! per-entity hourly tensors. [`balance_residuals`] and
//! [`hydrogen_chain_check`] recompute the physics from those tensors alone,
//! independent of the model's constraint matrix, so a solution can be
//! certified without trusting the builder.

use alloc::vec;
use alloc::vec::Vec;

use crate::formulation::{
    build_operation_lp, cost_breakdown, BuildError, CostBreakdown, MilpModel, VarKey,
};
use crate::grid::{HourlyProfile, NetworkCase, UnitKind};
use crate::solver::{solve_lp, LpStatus, SolveError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateKind {
    Line,
    Route,
}

impl core::fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            CandidateKind::Line => "candidate line",
            CandidateKind::Route => "hydrogen route",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanError {
    LineCount { expected: usize, found: usize },
    RouteCount { expected: usize, found: usize },
    PeriodCount { kind: CandidateKind, index: usize, expected: usize, found: usize },
    /// More than one build event over the horizon.
    Rebuilt { kind: CandidateKind, index: usize },
    /// Online flag contradicts the build history.
    OnlineMismatch { kind: CandidateKind, index: usize, period: usize },
}

impl core::fmt::Display for PlanError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            PlanError::LineCount { expected, found } => {
                write!(f, "plan covers {found} candidate lines, case has {expected}")
            }
            PlanError::RouteCount { expected, found } => {
                write!(f, "plan covers {found} hydrogen routes, case has {expected}")
            }
            PlanError::PeriodCount { kind, index, expected, found } => {
                write!(f, "{kind} #{index}: {found} periods in plan, horizon has {expected}")
            }
            PlanError::Rebuilt { kind, index } => {
                write!(f, "{kind} #{index}: more than one build event")
            }
            PlanError::OnlineMismatch { kind, index, period } => write!(
                f,
                "{kind} #{index}: online flag in period {period} contradicts build history"
            ),
        }
    }
}

/// Frozen investment decisions, indexed by candidate position (the order in
/// [`NetworkCase::candidate_lines`] / [`NetworkCase::hydrogen_routes`]) and
/// period. `*_built[k][p]` is the build event (v), `*_online[k][p]` the
/// online status (u).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvestmentPlan {
    pub line_built: Vec<Vec<bool>>,
    pub line_online: Vec<Vec<bool>>,
    pub h_built: Vec<Vec<bool>>,
    pub h_online: Vec<Vec<bool>>,
}

impl InvestmentPlan {
    /// Plan with no build events.
    pub fn empty(n_lines: usize, n_routes: usize, n_periods: usize) -> Self {
        InvestmentPlan {
            line_built: vec![vec![false; n_periods]; n_lines],
            line_online: vec![vec![false; n_periods]; n_lines],
            h_built: vec![vec![false; n_periods]; n_routes],
            h_online: vec![vec![false; n_periods]; n_routes],
        }
    }

    /// Plan from one optional build period per candidate; online from the
    /// build period onward.
    pub fn from_build_periods(
        lines: &[Option<usize>],
        routes: &[Option<usize>],
        n_periods: usize,
    ) -> Self {
        let mut plan = Self::empty(lines.len(), routes.len(), n_periods);
        for (k, &build) in lines.iter().enumerate() {
            if let Some(p) = build {
                plan.line_built[k][p] = true;
                for q in p..n_periods {
                    plan.line_online[k][q] = true;
                }
            }
        }
        for (h, &build) in routes.iter().enumerate() {
            if let Some(p) = build {
                plan.h_built[h][p] = true;
                for q in p..n_periods {
                    plan.h_online[h][q] = true;
                }
            }
        }
        plan
    }

    /// Read the binaries out of a planning-model solution (values above 0.5
    /// count as set). Models without hydrogen variables yield all-false
    /// route entries.
    pub fn from_solution(model: &MilpModel, values: &[f64], case: &NetworkCase) -> Self {
        let n_periods = case.horizon.n_periods;
        let set = |key: VarKey| model.value(values, key).is_some_and(|v| v > 0.5);
        let mut plan = Self::empty(
            case.candidate_lines.len(),
            case.hydrogen_routes.len(),
            n_periods,
        );
        for (k, c) in case.candidate_lines.iter().enumerate() {
            for p in 0..n_periods {
                plan.line_built[k][p] = set(VarKey::BuildLine { line: c.id, p });
                plan.line_online[k][p] = set(VarKey::OnlineLine { line: c.id, p });
            }
        }
        for (h, r) in case.hydrogen_routes.iter().enumerate() {
            for p in 0..n_periods {
                plan.h_built[h][p] = set(VarKey::BuildH { route: r.id, p });
                plan.h_online[h][p] = set(VarKey::OnlineH { route: r.id, p });
            }
        }
        plan
    }

    /// First (and only) build period of a candidate line, by position.
    pub fn line_build_period(&self, k: usize) -> Option<usize> {
        self.line_built[k].iter().position(|&b| b)
    }

    /// First (and only) build period of a hydrogen route, by position.
    pub fn route_build_period(&self, h: usize) -> Option<usize> {
        self.h_built[h].iter().position(|&b| b)
    }

    /// Shape and consistency against a case: one build event at most per
    /// candidate, and online exactly from the build period onward.
    pub fn check(&self, case: &NetworkCase) -> Result<(), PlanError> {
        let n_periods = case.horizon.n_periods;
        if self.line_built.len() != case.candidate_lines.len()
            || self.line_online.len() != case.candidate_lines.len()
        {
            return Err(PlanError::LineCount {
                expected: case.candidate_lines.len(),
                found: self.line_built.len().min(self.line_online.len()),
            });
        }
        if self.h_built.len() != case.hydrogen_routes.len()
            || self.h_online.len() != case.hydrogen_routes.len()
        {
            return Err(PlanError::RouteCount {
                expected: case.hydrogen_routes.len(),
                found: self.h_built.len().min(self.h_online.len()),
            });
        }
        check_candidate(&self.line_built, &self.line_online, CandidateKind::Line, n_periods)?;
        check_candidate(&self.h_built, &self.h_online, CandidateKind::Route, n_periods)
    }
}

fn check_candidate(
    built: &[Vec<bool>],
    online: &[Vec<bool>],
    kind: CandidateKind,
    n_periods: usize,
) -> Result<(), PlanError> {
    for (index, (b, u)) in built.iter().zip(online).enumerate() {
        for v in [b, u] {
            if v.len() != n_periods {
                return Err(PlanError::PeriodCount {
                    kind,
                    index,
                    expected: n_periods,
                    found: v.len(),
                });
            }
        }
        if b.iter().filter(|&&x| x).count() > 1 {
            return Err(PlanError::Rebuilt { kind, index });
        }
        let mut seen_build = false;
        for p in 0..n_periods {
            seen_build |= b[p];
            if u[p] != seen_build {
                return Err(PlanError::OnlineMismatch { kind, index, period: p });
            }
        }
    }
    Ok(())
}

/// Hourly operating point of one hydrogen route. Pipeline flow is in MWh of
/// hydrogen per hour; the three powers are per-unit electric.
#[derive(Clone, Debug, PartialEq)]
pub struct RouteSchedule {
    pub h_flow: HourlyProfile,
    pub p_elec: HourlyProfile,
    pub p_fc: HourlyProfile,
    pub p_comp: HourlyProfile,
}

/// Full dispatch of a fixed plan, unpacked per entity in case order.
#[derive(Clone, Debug, PartialEq)]
pub struct OperationResult {
    pub plan: InvestmentPlan,
    pub dispatch: Vec<HourlyProfile>,
    pub renewable_out: Vec<HourlyProfile>,
    pub curtailment: Vec<HourlyProfile>,
    pub flows: Vec<HourlyProfile>,
    pub new_line_flows: Vec<HourlyProfile>,
    pub angles: Vec<HourlyProfile>,
    pub shed: Vec<HourlyProfile>,
    pub hydrogen: Vec<RouteSchedule>,
    /// Operating costs only; investment is not part of the operation LP.
    pub costs: CostBreakdown,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvaluateError {
    Build(BuildError),
    Solver(SolveError),
    /// The plan admits no feasible dispatch (e.g. must-run generation with
    /// nowhere to go).
    Infeasible,
}

impl core::fmt::Display for EvaluateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvaluateError::Build(e) => write!(f, "cannot build operation model: {e}"),
            EvaluateError::Solver(e) => write!(f, "operation solve failed: {e}"),
            EvaluateError::Infeasible => f.write_str("operation problem is infeasible"),
        }
    }
}

/// Solve the dispatch LP for a frozen plan and unpack the optimum.
pub fn evaluate_plan(
    case: &NetworkCase,
    plan: &InvestmentPlan,
) -> Result<OperationResult, EvaluateError> {
    let model = build_operation_lp(case, plan).map_err(EvaluateError::Build)?;
    let sol = solve_lp(&model).map_err(EvaluateError::Solver)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(EvaluateError::Infeasible),
        LpStatus::Unbounded => {
            return Err(EvaluateError::Solver(SolveError::UnboundedRelaxation))
        }
    }
    let values = &sol.values;
    let tensor = |key: &dyn Fn(usize, usize, usize) -> VarKey| {
        HourlyProfile::from_fn(&case.horizon, |p, d, t| {
            model
                .value(values, key(p, d, t))
                .expect("operation model has all hourly columns")
        })
    };

    let dispatch = case
        .generators
        .iter()
        .map(|g| {
            tensor(&|p, d, t| match g.kind {
                UnitKind::Existing => VarKey::GenExisting { gen: g.id, p, d, t },
                UnitKind::New => VarKey::GenNew { gen: g.id, p, d, t },
            })
        })
        .collect();
    let renewable_out = case
        .renewables
        .iter()
        .map(|r| {
            tensor(&|p, d, t| match r.kind {
                UnitKind::Existing => VarKey::RenOut { plant: r.id, p, d, t },
                UnitKind::New => VarKey::RenNewOut { plant: r.id, p, d, t },
            })
        })
        .collect();
    let curtailment = case
        .renewables
        .iter()
        .map(|r| {
            tensor(&|p, d, t| match r.kind {
                UnitKind::Existing => VarKey::RenCur { plant: r.id, p, d, t },
                UnitKind::New => VarKey::RenNewCur { plant: r.id, p, d, t },
            })
        })
        .collect();
    let flows = case
        .lines
        .iter()
        .map(|l| tensor(&|p, d, t| VarKey::FlowLine { line: l.id, p, d, t }))
        .collect();
    let new_line_flows = case
        .candidate_lines
        .iter()
        .map(|c| tensor(&|p, d, t| VarKey::FlowNewLine { line: c.id, p, d, t }))
        .collect();
    let angles = case
        .buses
        .iter()
        .map(|b| tensor(&|p, d, t| VarKey::Angle { bus: b.id, p, d, t }))
        .collect();
    let shed = case
        .buses
        .iter()
        .map(|b| tensor(&|p, d, t| VarKey::Shed { bus: b.id, p, d, t }))
        .collect();
    let hydrogen = case
        .hydrogen_routes
        .iter()
        .map(|r| RouteSchedule {
            h_flow: tensor(&|p, d, t| VarKey::HFlow { route: r.id, p, d, t }),
            p_elec: tensor(&|p, d, t| VarKey::PElec { route: r.id, p, d, t }),
            p_fc: tensor(&|p, d, t| VarKey::PFuelCell { route: r.id, p, d, t }),
            p_comp: tensor(&|p, d, t| VarKey::PComp { route: r.id, p, d, t }),
        })
        .collect();
    let costs = cost_breakdown(&model, values, case)
        .expect("solution vector length matches by construction");

    Ok(OperationResult {
        plan: plan.clone(),
        dispatch,
        renewable_out,
        curtailment,
        flows,
        new_line_flows,
        angles,
        shed,
        hydrogen,
        costs,
        objective: sol.objective,
    })
}

/// Per-bus nodal balance residual (injections minus load), recomputed from
/// the result tensors. Zero everywhere for a physically consistent dispatch.
pub fn balance_residuals(case: &NetworkCase, result: &OperationResult) -> Vec<HourlyProfile> {
    case.buses
        .iter()
        .enumerate()
        .map(|(i, bus)| {
            HourlyProfile::from_fn(&case.horizon, |p, d, t| {
                let mut acc = 0.0;
                for (k, l) in case.lines.iter().enumerate() {
                    let f = result.flows[k].get(p, d, t);
                    if l.to_bus == bus.id {
                        acc += f;
                    }
                    if l.from_bus == bus.id {
                        acc -= f;
                    }
                }
                for (k, c) in case.candidate_lines.iter().enumerate() {
                    let f = result.new_line_flows[k].get(p, d, t);
                    if c.to_bus == bus.id {
                        acc += f;
                    }
                    if c.from_bus == bus.id {
                        acc -= f;
                    }
                }
                for (k, g) in case.generators.iter().enumerate() {
                    if g.bus == bus.id {
                        acc += result.dispatch[k].get(p, d, t);
                    }
                }
                for (k, r) in case.renewables.iter().enumerate() {
                    if r.bus == bus.id {
                        acc += result.renewable_out[k].get(p, d, t)
                            - result.curtailment[k].get(p, d, t);
                    }
                }
                for (k, rt) in case.hydrogen_routes.iter().enumerate() {
                    let sched = &result.hydrogen[k];
                    if rt.to_bus == bus.id {
                        acc += sched.p_fc.get(p, d, t);
                    }
                    if rt.from_bus == bus.id {
                        acc -= sched.p_elec.get(p, d, t) + sched.p_comp.get(p, d, t);
                    }
                }
                acc += result.shed[i].get(p, d, t);
                acc - case.load.by_bus[i].get(p, d, t)
            })
        })
        .collect()
}

/// Largest violation of the three conversion identities (electrolyzer,
/// fuel cell, compressor) across all routes and hours, recomputed from the
/// result tensors.
pub fn hydrogen_chain_check(case: &NetworkCase, result: &OperationResult) -> f64 {
    let b = case.mva_base;
    let mut worst: f64 = 0.0;
    for (k, rt) in case.hydrogen_routes.iter().enumerate() {
        let sched = &result.hydrogen[k];
        for (p, d, t) in case.horizon.hours() {
            let h = sched.h_flow.get(p, d, t);
            worst = worst.max((rt.eta_e * b * sched.p_elec.get(p, d, t) - h).abs());
            worst = worst.max((b * sched.p_fc.get(p, d, t) - rt.eta_f * h).abs());
            worst = worst.max((rt.eta_c * h - b * sched.p_comp.get(p, d, t)).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{three_bus_case, two_bus_case};
    use crate::formulation::build_tep_h;

    fn built_route() -> InvestmentPlan {
        InvestmentPlan::from_build_periods(&[], &[Some(0)], 1)
    }

    fn max_residual(case: &NetworkCase, result: &OperationResult) -> f64 {
        balance_residuals(case, result)
            .iter()
            .flat_map(|p| p.values().iter())
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }

    #[test]
    fn two_bus_online_route_carries_peak_load() {
        let case = two_bus_case();
        let result = evaluate_plan(&case, &built_route()).unwrap();
        // Line at 9.5 pu, the rest of the 14.5 pu peak via the route:
        // fuel cell at its 5 pu rating, electrolyzer at its 10 pu rating.
        let sched = &result.hydrogen[0];
        assert!((sched.p_elec.get(0, 0, 0) - 10.0).abs() < 1e-7);
        assert!((sched.p_fc.get(0, 0, 0) - 5.0).abs() < 1e-7);
        assert!((sched.h_flow.get(0, 0, 0) - 800.0).abs() < 1e-5);
        assert!((result.dispatch[0].get(0, 0, 0) - 9.5).abs() < 1e-7);
        assert_eq!(result.shed[1].get(0, 0, 0), 0.0);
        // Pure generation cost: 9.5 pu * 100 MVA * 5 yr * 365 d * 3e-5.
        assert!((result.objective - 52.0125).abs() < 1e-7);
        assert!((result.costs.total - result.objective).abs() < 1e-9);
        assert!(max_residual(&case, &result) < 1e-9);
        assert!(hydrogen_chain_check(&case, &result) < 1e-6);
    }

    #[test]
    fn two_bus_offline_route_sheds_surplus_demand() {
        let case = two_bus_case();
        let offline = InvestmentPlan::empty(0, 1, 1);
        let result = evaluate_plan(&case, &offline).unwrap();
        assert!((result.shed[1].get(0, 0, 0) - 5.0).abs() < 1e-7);
        assert!((result.objective - 5.0e6).abs() < 1.0);
        // Offline hydrogen columns are pinned at zero by bounds, not merely
        // small.
        let sched = &result.hydrogen[0];
        assert_eq!(sched.h_flow.get(0, 0, 0), 0.0);
        assert_eq!(sched.p_elec.get(0, 0, 0), 0.0);
        assert_eq!(sched.p_fc.get(0, 0, 0), 0.0);
        assert_eq!(sched.p_comp.get(0, 0, 0), 0.0);
        assert!(max_residual(&case, &result) < 1e-9);
    }

    #[test]
    fn online_operation_never_costs_more_than_offline() {
        let case = two_bus_case();
        let on = evaluate_plan(&case, &built_route()).unwrap();
        let off = evaluate_plan(&case, &InvestmentPlan::empty(0, 1, 1)).unwrap();
        assert!(on.objective <= off.objective + 1e-9);
    }

    #[test]
    fn zero_load_costs_nothing() {
        let mut case = two_bus_case();
        case.load.by_bus[1] = HourlyProfile::filled(1, 1, 1, 0.0);
        let result = evaluate_plan(&case, &InvestmentPlan::empty(0, 1, 1)).unwrap();
        assert_eq!(result.objective, 0.0);
        assert!(max_residual(&case, &result) < 1e-12);
    }

    #[test]
    fn perturbed_dispatch_shows_up_in_residuals() {
        let case = two_bus_case();
        let mut result = evaluate_plan(&case, &built_route()).unwrap();
        let v = result.dispatch[0].get(0, 0, 0);
        result.dispatch[0].set(0, 0, 0, v + 0.1);
        let res = balance_residuals(&case, &result);
        assert!((res[0].get(0, 0, 0) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn conversion_chain_composes_efficiencies() {
        let mut case = two_bus_case();
        case.hydrogen_routes[0].eta_e = 0.6;
        case.hydrogen_routes[0].eta_f = 0.8;
        let result = evaluate_plan(&case, &built_route()).unwrap();
        let sched = &result.hydrogen[0];
        let pe = sched.p_elec.get(0, 0, 0);
        let pf = sched.p_fc.get(0, 0, 0);
        assert!(pe > 1.0, "electrolyzer should run, got {pe}");
        assert!((pf - 0.48 * pe).abs() < 1e-9, "round trip 0.48, {pf} vs {pe}");
        assert!(hydrogen_chain_check(&case, &result) < 1e-6);
    }

    #[test]
    fn compressor_draw_follows_flow() {
        let mut case = two_bus_case();
        case.hydrogen_routes[0].eta_c = 0.05;
        let result = evaluate_plan(&case, &built_route()).unwrap();
        let sched = &result.hydrogen[0];
        let h = sched.h_flow.get(0, 0, 0);
        assert!(h > 0.0);
        assert!((sched.p_comp.get(0, 0, 0) - 0.05 * h / case.mva_base).abs() < 1e-9);
        assert!(max_residual(&case, &result) < 1e-9);
    }

    #[test]
    fn build_periods_round_trip() {
        let plan = InvestmentPlan::from_build_periods(&[None, Some(1)], &[Some(0)], 3);
        assert_eq!(plan.line_build_period(0), None);
        assert_eq!(plan.line_build_period(1), Some(1));
        assert_eq!(plan.route_build_period(0), Some(0));
        assert_eq!(plan.line_online[1], vec![false, true, true]);
        assert_eq!(plan.h_online[0], vec![true, true, true]);
    }

    #[test]
    fn check_flags_malformed_plans() {
        let case = three_bus_case(); // 1 candidate line, 1 route, 2 periods
        let ok = InvestmentPlan::from_build_periods(&[Some(1)], &[None], 2);
        assert_eq!(ok.check(&case), Ok(()));

        let wrong_count = InvestmentPlan::empty(2, 1, 2);
        assert!(matches!(
            wrong_count.check(&case),
            Err(PlanError::LineCount { expected: 1, found: 2 })
        ));

        let mut short = InvestmentPlan::empty(1, 1, 2);
        short.h_built[0].pop();
        assert!(matches!(
            short.check(&case),
            Err(PlanError::PeriodCount { kind: CandidateKind::Route, .. })
        ));

        let mut rebuilt = InvestmentPlan::from_build_periods(&[Some(0)], &[None], 2);
        rebuilt.line_built[0][1] = true;
        assert!(matches!(
            rebuilt.check(&case),
            Err(PlanError::Rebuilt { kind: CandidateKind::Line, .. })
        ));

        let mut mismatched = InvestmentPlan::from_build_periods(&[Some(0)], &[None], 2);
        mismatched.line_online[0][1] = false;
        assert!(matches!(
            mismatched.check(&case),
            Err(PlanError::OnlineMismatch { period: 1, .. })
        ));
    }

    #[test]
    fn from_solution_reads_planning_binaries() {
        let case = two_bus_case();
        let model = build_tep_h(&case).unwrap();
        let mut x = alloc::vec![0.0; model.columns.len()];
        x[model.col(VarKey::BuildH { route: 1, p: 0 }).unwrap()] = 1.0;
        x[model.col(VarKey::OnlineH { route: 1, p: 0 }).unwrap()] = 1.0;
        let plan = InvestmentPlan::from_solution(&model, &x, &case);
        assert_eq!(plan.route_build_period(0), Some(0));
        assert_eq!(plan.check(&case), Ok(()));
    }
}
