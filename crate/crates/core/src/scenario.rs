//! Scenario sweeps over the experiment axes.
//!
//! A [`SweepAxis`] lists the levels of renewable penetration, hydrogen
//! round-trip efficiency and hydrogen cost reduction to explore. [`run_sweep`]
//! solves the planning model at every combination and returns one
//! [`ScenarioRow`] per point, with the cost split and the build decisions a
//! report needs. Failures are carried in the row rather than aborting the
//! sweep, so one sour point does not waste the rest of a long run.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::formulation::{
    build_tep_h, build_tep_t, cost_breakdown, BuildError, MilpModel,
};
use crate::grid::{NetworkCase, TransformError};
use crate::operation::InvestmentPlan;
use crate::solver::{solve_milp, MilpStatus, DEFAULT_NODE_LIMIT};

/// Which planning model a sweep runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelChoice {
    /// Co-expansion: candidate lines plus hydrogen routes.
    TepH,
    /// Lines-only benchmark.
    TepT,
}

impl ModelChoice {
    pub fn build(self, case: &NetworkCase) -> Result<MilpModel, BuildError> {
        match self {
            ModelChoice::TepH => build_tep_h(case),
            ModelChoice::TepT => build_tep_t(case),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelChoice::TepH => "tep_h",
            ModelChoice::TepT => "tep_t",
        }
    }
}

/// Branch-and-bound knobs for a sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveParams {
    pub gap_target: f64,
    pub node_limit: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            gap_target: 0.001,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

/// Levels to sweep per axis. An empty axis means "leave that dimension at
/// the base case", so an all-empty sweep solves the base case once.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepAxis {
    pub penetration_levels: Vec<f64>,
    pub round_trip_levels: Vec<f64>,
    pub cost_reductions: Vec<f64>,
}

/// How an axis point ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowStatus {
    /// Proven within the gap target.
    Solved,
    /// Node budget exhausted; values come from the incumbent.
    NodeLimit,
    /// Transform, build or solve failed; message says why.
    Failed(String),
}

impl RowStatus {
    pub fn as_str(&self) -> &str {
        match self {
            RowStatus::Solved => "solved",
            RowStatus::NodeLimit => "node_limit",
            RowStatus::Failed(_) => "failed",
        }
    }
}

/// One axis point of a sweep. Axis fields are `None` when that dimension
/// was not swept.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioRow {
    pub penetration: Option<f64>,
    pub round_trip: Option<f64>,
    pub cost_reduction: Option<f64>,
    pub status: RowStatus,
    pub pipelines_built: usize,
    pub lines_built: usize,
    /// Period labels of the hydrogen build events, one per built route.
    pub construction_periods: Vec<String>,
    pub hydrogen_investment: f64,
    pub line_investment: f64,
    pub generation_cost: f64,
    pub shed_penalty_value: f64,
    pub total: f64,
    pub gap: f64,
}

impl ScenarioRow {
    fn failed(
        penetration: Option<f64>,
        round_trip: Option<f64>,
        cost_reduction: Option<f64>,
        message: String,
    ) -> Self {
        ScenarioRow {
            penetration,
            round_trip,
            cost_reduction,
            status: RowStatus::Failed(message),
            pipelines_built: 0,
            lines_built: 0,
            construction_periods: Vec::new(),
            hydrogen_investment: 0.0,
            line_investment: 0.0,
            generation_cost: 0.0,
            shed_penalty_value: 0.0,
            total: f64::NAN,
            gap: f64::NAN,
        }
    }
}

/// Retarget every route's round-trip efficiency to `target` by scaling its
/// electrolyzer and fuel-cell efficiencies with the same factor
/// sqrt(target / current round-trip), preserving the split between the two.
pub fn scale_round_trip(case: &NetworkCase, target: f64) -> Result<NetworkCase, TransformError> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(TransformError::BadRoundTrip { target });
    }
    let mut out = case.clone();
    for r in &mut out.hydrogen_routes {
        let current = r.round_trip();
        if current <= 0.0 {
            return Err(TransformError::BadRoundTrip { target });
        }
        let factor = libm::sqrt(target / current);
        r.eta_e *= factor;
        r.eta_f *= factor;
        if r.eta_e > 1.0 || r.eta_f > 1.0 {
            return Err(TransformError::EfficiencyAboveOne {
                route: r.id,
                target,
            });
        }
    }
    Ok(out)
}

fn apply_point(
    case: &NetworkCase,
    penetration: Option<f64>,
    round_trip: Option<f64>,
    cost_reduction: Option<f64>,
) -> Result<NetworkCase, TransformError> {
    let mut out = case.clone();
    if let Some(p) = penetration {
        out = out.scale_renewable_penetration(p)?;
    }
    if let Some(rt) = round_trip {
        out = scale_round_trip(&out, rt)?;
    }
    if let Some(c) = cost_reduction {
        out = out.with_hydrogen_cost_reduction(c);
    }
    Ok(out)
}

fn solve_point(
    case: &NetworkCase,
    choice: ModelChoice,
    params: &SolveParams,
    penetration: Option<f64>,
    round_trip: Option<f64>,
    cost_reduction: Option<f64>,
) -> ScenarioRow {
    let fail = |msg: String| ScenarioRow::failed(penetration, round_trip, cost_reduction, msg);
    let scenario = match apply_point(case, penetration, round_trip, cost_reduction) {
        Ok(c) => c,
        Err(e) => return fail(format!("transform: {e}")),
    };
    let model = match choice.build(&scenario) {
        Ok(m) => m,
        Err(e) => return fail(format!("build: {e}")),
    };
    let sol = match solve_milp(&model, params.gap_target, params.node_limit) {
        Ok(s) => s,
        Err(e) => return fail(format!("solve: {e}")),
    };
    let status = match sol.status {
        MilpStatus::Optimal => RowStatus::Solved,
        MilpStatus::NodeLimit if !sol.values.is_empty() => RowStatus::NodeLimit,
        MilpStatus::NodeLimit => return fail(String::from("node limit hit with no incumbent")),
        MilpStatus::Infeasible => return fail(String::from("model is infeasible")),
    };
    let breakdown = match cost_breakdown(&model, &sol.values, &scenario) {
        Ok(b) => b,
        Err(e) => return fail(format!("cost breakdown: {e}")),
    };
    let plan = InvestmentPlan::from_solution(&model, &sol.values, &scenario);
    let mut construction_periods = Vec::new();
    let mut pipelines_built = 0;
    for h in 0..scenario.hydrogen_routes.len() {
        if let Some(p) = plan.route_build_period(h) {
            pipelines_built += 1;
            construction_periods.push(scenario.horizon.period_labels[p].clone());
        }
    }
    let lines_built = (0..scenario.candidate_lines.len())
        .filter(|&k| plan.line_build_period(k).is_some())
        .count();
    ScenarioRow {
        penetration,
        round_trip,
        cost_reduction,
        status,
        pipelines_built,
        lines_built,
        construction_periods,
        hydrogen_investment: breakdown.hydrogen,
        line_investment: breakdown.new_lines,
        generation_cost: breakdown.generation,
        shed_penalty_value: breakdown.shed_penalty_value,
        total: breakdown.total,
        gap: sol.gap,
    }
}

/// Solve the chosen model at every combination of axis levels and return the
/// rows in lexicographic order (penetration outermost, cost reduction
/// innermost). An empty axis contributes a single "base case" level.
pub fn run_sweep(
    case: &NetworkCase,
    axes: &SweepAxis,
    choice: ModelChoice,
    params: &SolveParams,
) -> Vec<ScenarioRow> {
    let levels = |v: &Vec<f64>| -> Vec<Option<f64>> {
        if v.is_empty() {
            alloc::vec![None]
        } else {
            v.iter().copied().map(Some).collect()
        }
    };
    let pens = levels(&axes.penetration_levels);
    let rts = levels(&axes.round_trip_levels);
    let costs = levels(&axes.cost_reductions);

    let mut rows = Vec::with_capacity(pens.len() * rts.len() * costs.len());
    for &pen in &pens {
        for &rt in &rts {
            for &cr in &costs {
                rows.push(solve_point(case, choice, params, pen, rt, cr));
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{three_bus_case, two_bus_case};
    use crate::solver::solve_milp;

    #[test]
    fn empty_axes_reproduce_a_direct_solve() {
        let case = two_bus_case();
        let params = SolveParams::default();
        let rows = run_sweep(&case, &SweepAxis::default(), ModelChoice::TepH, &params);
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.status, RowStatus::Solved);
        assert_eq!(row.penetration, None);

        let model = build_tep_h(&case).unwrap();
        let direct = solve_milp(&model, params.gap_target, params.node_limit).unwrap();
        assert!((row.total - direct.objective).abs() <= 1e-9 * direct.objective.abs());
        assert_eq!(row.pipelines_built, 1);
        assert_eq!(row.construction_periods, vec![String::from("2021-2025")]);
    }

    #[test]
    fn sweep_rows_come_out_in_lexicographic_order() {
        let case = two_bus_case();
        let axes = SweepAxis {
            penetration_levels: Vec::new(),
            round_trip_levels: alloc::vec![0.4, 0.5],
            cost_reductions: alloc::vec![0.0, 0.3],
        };
        let rows = run_sweep(&case, &axes, ModelChoice::TepH, &SolveParams::default());
        assert_eq!(rows.len(), 4);
        let keys: Vec<(Option<f64>, Option<f64>)> = rows
            .iter()
            .map(|r| (r.round_trip, r.cost_reduction))
            .collect();
        assert_eq!(
            keys,
            alloc::vec![
                (Some(0.4), Some(0.0)),
                (Some(0.4), Some(0.3)),
                (Some(0.5), Some(0.0)),
                (Some(0.5), Some(0.3)),
            ]
        );
    }

    #[test]
    fn sweeps_are_deterministic() {
        let case = three_bus_case();
        let axes = SweepAxis {
            penetration_levels: alloc::vec![0.3, 0.9],
            round_trip_levels: Vec::new(),
            cost_reductions: alloc::vec![0.0],
        };
        let a = run_sweep(&case, &axes, ModelChoice::TepH, &SolveParams::default());
        let b = run_sweep(&case, &axes, ModelChoice::TepH, &SolveParams::default());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.total.to_bits(), y.total.to_bits());
            assert_eq!(x.pipelines_built, y.pipelines_built);
            assert_eq!(x.status, y.status);
        }
    }

    #[test]
    fn round_trip_scaling_hits_the_product_and_keeps_the_split() {
        let case = two_bus_case();
        let base = &case.hydrogen_routes[0];
        let split = base.eta_e / base.eta_f;
        let scaled = scale_round_trip(&case, 0.3).unwrap();
        let r = &scaled.hydrogen_routes[0];
        assert!((r.round_trip() - 0.3).abs() < 1e-12);
        assert!((r.eta_e / r.eta_f - split).abs() < 1e-12);

        // Raising the product beyond what unit efficiencies allow is an error.
        assert!(matches!(
            scale_round_trip(&case, 2.5),
            Err(TransformError::EfficiencyAboveOne { route: 1, .. })
        ));
        assert!(matches!(
            scale_round_trip(&case, 0.0),
            Err(TransformError::BadRoundTrip { .. })
        ));
    }

    #[test]
    fn bad_axis_points_fail_their_row_only() {
        let case = two_bus_case();
        let axes = SweepAxis {
            penetration_levels: Vec::new(),
            round_trip_levels: alloc::vec![-1.0, 0.5],
            cost_reductions: Vec::new(),
        };
        let rows = run_sweep(&case, &axes, ModelChoice::TepH, &SolveParams::default());
        assert_eq!(rows.len(), 2);
        assert!(matches!(rows[0].status, RowStatus::Failed(_)));
        assert!(rows[0].total.is_nan());
        assert_eq!(rows[1].status, RowStatus::Solved);
    }

    #[test]
    fn tep_t_rows_never_build_hydrogen() {
        let case = two_bus_case();
        let rows = run_sweep(
            &case,
            &SweepAxis::default(),
            ModelChoice::TepT,
            &SolveParams::default(),
        );
        assert_eq!(rows[0].pipelines_built, 0);
        assert_eq!(rows[0].hydrogen_investment, 0.0);
        // Without the route the peak sheds; hydrogen must be the cheaper plan.
        let h_rows = run_sweep(
            &case,
            &SweepAxis::default(),
            ModelChoice::TepH,
            &SolveParams::default(),
        );
        assert!(h_rows[0].total < rows[0].total);
    }
}
