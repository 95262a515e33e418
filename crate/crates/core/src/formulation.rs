//! Solver-agnostic MILP assembly for the planning models (TEP-H with
//! hydrogen routes, TEP-T lines-only benchmark) and the fixed-plan
//! operation LP, plus decomposition of solutions into cost components.
//!
//! Column and row names are deterministic: the entity id followed by
//! zero-based (t, d, p) = (hour, day, period) indices, e.g. `pG[3,0,1,0]`
//! or `uNL[2,1]`, so exported models are diffable across runs.
//!
//! Column families are emitted in a fixed order (hour-indexed families
//! first, then the investment binaries); within a family the entity varies
//! slowest, then period, day, hour.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{CandidateLine, HydrogenRoute, NetworkCase, PlanningHorizon, UnitKind, Violation};
use crate::operation::{InvestmentPlan, PlanError};

/// Identity of one decision variable. Hour-indexed keys carry
/// (entity id, period, day, hour); investment keys carry (entity id, period).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKey {
    /// Existing thermal output p^G.
    GenExisting { gen: usize, p: usize, d: usize, t: usize },
    /// New thermal output p^NG.
    GenNew { gen: usize, p: usize, d: usize, t: usize },
    /// Existing renewable output p^R.
    RenOut { plant: usize, p: usize, d: usize, t: usize },
    /// New renewable output p^NR.
    RenNewOut { plant: usize, p: usize, d: usize, t: usize },
    /// Existing renewable curtailment p^RCUR.
    RenCur { plant: usize, p: usize, d: usize, t: usize },
    /// New renewable curtailment p^NRCUR.
    RenNewCur { plant: usize, p: usize, d: usize, t: usize },
    /// Existing line flow p^L, signed from -> to.
    FlowLine { line: usize, p: usize, d: usize, t: usize },
    /// Candidate line flow p^NL.
    FlowNewLine { line: usize, p: usize, d: usize, t: usize },
    /// Bus voltage angle theta.
    Angle { bus: usize, p: usize, d: usize, t: usize },
    /// Load shedding p^SD.
    Shed { bus: usize, p: usize, d: usize, t: usize },
    /// Hydrogen pipeline flow h, MWh-H2 per hour.
    HFlow { route: usize, p: usize, d: usize, t: usize },
    /// Electrolyzer input power p^E.
    PElec { route: usize, p: usize, d: usize, t: usize },
    /// Fuel-cell output power p^F.
    PFuelCell { route: usize, p: usize, d: usize, t: usize },
    /// Compressor input power p^C.
    PComp { route: usize, p: usize, d: usize, t: usize },
    /// Line build event v^NL.
    BuildLine { line: usize, p: usize },
    /// Line online status u^NL.
    OnlineLine { line: usize, p: usize },
    /// Hydrogen route build event v^H.
    BuildH { route: usize, p: usize },
    /// Hydrogen route online status u^H.
    OnlineH { route: usize, p: usize },
}

impl VarKey {
    pub fn name(&self) -> String {
        match *self {
            VarKey::GenExisting { gen, p, d, t } => format!("pG[{gen},{t},{d},{p}]"),
            VarKey::GenNew { gen, p, d, t } => format!("pNG[{gen},{t},{d},{p}]"),
            VarKey::RenOut { plant, p, d, t } => format!("pR[{plant},{t},{d},{p}]"),
            VarKey::RenNewOut { plant, p, d, t } => format!("pNR[{plant},{t},{d},{p}]"),
            VarKey::RenCur { plant, p, d, t } => format!("pRCUR[{plant},{t},{d},{p}]"),
            VarKey::RenNewCur { plant, p, d, t } => format!("pNRCUR[{plant},{t},{d},{p}]"),
            VarKey::FlowLine { line, p, d, t } => format!("pL[{line},{t},{d},{p}]"),
            VarKey::FlowNewLine { line, p, d, t } => format!("pNL[{line},{t},{d},{p}]"),
            VarKey::Angle { bus, p, d, t } => format!("theta[{bus},{t},{d},{p}]"),
            VarKey::Shed { bus, p, d, t } => format!("pSD[{bus},{t},{d},{p}]"),
            VarKey::HFlow { route, p, d, t } => format!("hH[{route},{t},{d},{p}]"),
            VarKey::PElec { route, p, d, t } => format!("pE[{route},{t},{d},{p}]"),
            VarKey::PFuelCell { route, p, d, t } => format!("pF[{route},{t},{d},{p}]"),
            VarKey::PComp { route, p, d, t } => format!("pC[{route},{t},{d},{p}]"),
            VarKey::BuildLine { line, p } => format!("vNL[{line},{p}]"),
            VarKey::OnlineLine { line, p } => format!("uNL[{line},{p}]"),
            VarKey::BuildH { route, p } => format!("vH[{route},{p}]"),
            VarKey::OnlineH { route, p } => format!("uH[{route},{p}]"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
    pub integral: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    /// Sparse (column index, coefficient) pairs, deduplicated.
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// A mixed-integer linear program in computational form.
///
/// `var_index` maps [`VarKey`]s to column positions for models produced by
/// the builders in this module; models read back from MPS text have an
/// empty map.
#[derive(Clone, Debug, PartialEq)]
pub struct MilpModel {
    pub name: String,
    pub sense: ObjSense,
    /// Constant added to the objective value.
    pub objective_offset: f64,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub var_index: BTreeMap<VarKey, usize>,
}

impl MilpModel {
    pub fn new(name: &str, sense: ObjSense) -> Self {
        MilpModel {
            name: String::from(name),
            sense,
            objective_offset: 0.0,
            columns: Vec::new(),
            rows: Vec::new(),
            var_index: BTreeMap::new(),
        }
    }

    pub fn add_column(
        &mut self,
        name: String,
        lower: f64,
        upper: f64,
        objective: f64,
        integral: bool,
    ) -> usize {
        let idx = self.columns.len();
        self.columns.push(Column {
            name,
            lower,
            upper,
            objective,
            integral,
        });
        idx
    }

    fn add_var(
        &mut self,
        key: VarKey,
        lower: f64,
        upper: f64,
        objective: f64,
        integral: bool,
    ) -> usize {
        let idx = self.add_column(key.name(), lower, upper, objective, integral);
        self.var_index.insert(key, idx);
        idx
    }

    pub fn add_row(&mut self, name: String, coeffs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.columns.len()));
        self.rows.push(Row {
            name,
            coeffs,
            sense,
            rhs,
        });
    }

    /// Column position of a formulation variable.
    pub fn col(&self, key: VarKey) -> Option<usize> {
        self.var_index.get(&key).copied()
    }

    /// Solution value of a formulation variable.
    pub fn value(&self, values: &[f64], key: VarKey) -> Option<f64> {
        self.col(key).map(|j| values[j])
    }

    pub fn n_integer(&self) -> usize {
        self.columns.iter().filter(|c| c.integral).count()
    }

    /// Objective value of a point, including the constant offset.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_offset
            + self
                .columns
                .iter()
                .zip(values)
                .map(|(c, &x)| c.objective * x)
                .sum::<f64>()
    }

    pub fn row_activity(&self, row: usize, values: &[f64]) -> f64 {
        self.rows[row]
            .coeffs
            .iter()
            .map(|&(j, a)| a * values[j])
            .sum()
    }

    /// Largest bound or row violation of a point (independent re-check used
    /// to certify solver output).
    pub fn max_constraint_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (c, &x) in self.columns.iter().zip(values) {
            worst = worst.max(c.lower - x).max(x - c.upper);
        }
        for (i, row) in self.rows.iter().enumerate() {
            let act = self.row_activity(i, values);
            let v = match row.sense {
                RowSense::Le => act - row.rhs,
                RowSense::Ge => row.rhs - act,
                RowSense::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Largest distance of an integer column from the nearest integer.
    pub fn max_integrality_violation(&self, values: &[f64]) -> f64 {
        self.columns
            .iter()
            .zip(values)
            .filter(|(c, _)| c.integral)
            .map(|(_, &x)| (x - libm::round(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// The objective's cost components (generation, new-line investment,
/// hydrogen investment, shedding penalty).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostBreakdown {
    pub generation: f64,
    pub new_lines: f64,
    pub hydrogen: f64,
    pub shed_penalty_value: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(generation: f64, new_lines: f64, hydrogen: f64, shed_penalty_value: f64) -> Self {
        CostBreakdown {
            generation,
            new_lines,
            hydrogen,
            shed_penalty_value,
            total: generation + new_lines + hydrogen + shed_penalty_value,
        }
    }

    pub const ZERO: CostBreakdown = CostBreakdown {
        generation: 0.0,
        new_lines: 0.0,
        hydrogen: 0.0,
        shed_penalty_value: 0.0,
        total: 0.0,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub enum BuildError {
    /// The case fails validation; building requires a clean case.
    InvalidCase(Vec<Violation>),
    /// The supplied investment plan is malformed or inconsistent.
    BadPlan(PlanError),
}

impl core::fmt::Display for BuildError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BuildError::InvalidCase(v) => {
                write!(f, "case fails validation ({} violation(s)", v.len())?;
                if let Some(first) = v.first() {
                    write!(f, ", first: {first}")?;
                }
                write!(f, ")")
            }
            BuildError::BadPlan(e) => write!(f, "invalid investment plan: {e}"),
        }
    }
}

/// Capital plus maintenance cost of a candidate line built in (zero-based)
/// `build_period`: C * (1 + (N^P - p) * R^M * N^Y).
pub fn line_investment_cost(
    horizon: &PlanningHorizon,
    line: &CandidateLine,
    build_period: usize,
) -> f64 {
    let periods_maintained = (horizon.n_periods - build_period) as f64;
    line.capital_cost
        * (1.0 + periods_maintained * line.maintenance_ratio * horizon.years_per_period as f64)
}

/// Investment cost of a hydrogen route built in (zero-based) `build_period`:
/// maintenance applies to the pipeline term only; electrolyzer and fuel-cell
/// capital enter plain.
pub fn hydrogen_investment_cost(
    horizon: &PlanningHorizon,
    route: &HydrogenRoute,
    build_period: usize,
) -> f64 {
    let periods_maintained = (horizon.n_periods - build_period) as f64;
    route.pipeline_cost
        * (1.0 + periods_maintained * route.maintenance_ratio * horizon.years_per_period as f64)
        + route.electrolyzer_cost
        + route.fuelcell_cost
}

/// Total investment cost of a plan (all build events priced at their build
/// period).
pub fn plan_investment_cost(case: &NetworkCase, plan: &InvestmentPlan) -> f64 {
    let mut total = 0.0;
    for (k, line) in case.candidate_lines.iter().enumerate() {
        if let Some(p) = plan.line_build_period(k) {
            total += line_investment_cost(&case.horizon, line, p);
        }
    }
    for (h, route) in case.hydrogen_routes.iter().enumerate() {
        if let Some(p) = plan.route_build_period(h) {
            total += hydrogen_investment_cost(&case.horizon, route, p);
        }
    }
    total
}

/// Build the full co-expansion MILP (hydrogen routes and candidate lines).
pub fn build_tep_h(case: &NetworkCase) -> Result<MilpModel, BuildError> {
    Builder::planning(case, true)?.build()
}

/// Build the lines-only benchmark MILP: no hydrogen columns, no conversion
/// or cap rows, no hydrogen terms in the balance rows or the objective.
pub fn build_tep_t(case: &NetworkCase) -> Result<MilpModel, BuildError> {
    Builder::planning(case, false)?.build()
}

/// Build the pure operation LP for a fixed plan: binaries are substituted
/// by constants, big-M rows harden to DC equalities for online lines and
/// disappear for offline ones, and offline candidate flows are fixed to
/// zero through their column bounds.
pub fn build_operation_lp(
    case: &NetworkCase,
    plan: &InvestmentPlan,
) -> Result<MilpModel, BuildError> {
    plan.check(case).map_err(BuildError::BadPlan)?;
    Builder::operation(case, plan)?.build()
}

struct Builder<'a> {
    case: &'a NetworkCase,
    hydrogen: bool,
    plan: Option<&'a InvestmentPlan>,
    model: MilpModel,
}

impl<'a> Builder<'a> {
    fn planning(case: &'a NetworkCase, hydrogen: bool) -> Result<Self, BuildError> {
        Self::checked(case, hydrogen, None)
    }

    fn operation(case: &'a NetworkCase, plan: &'a InvestmentPlan) -> Result<Self, BuildError> {
        Self::checked(case, true, Some(plan))
    }

    fn checked(
        case: &'a NetworkCase,
        hydrogen: bool,
        plan: Option<&'a InvestmentPlan>,
    ) -> Result<Self, BuildError> {
        let violations = case.validate();
        if !violations.is_empty() {
            return Err(BuildError::InvalidCase(violations));
        }
        let name = match (plan, hydrogen) {
            (Some(_), _) => "operation",
            (None, true) => "tep_h",
            (None, false) => "tep_t",
        };
        Ok(Builder {
            case,
            hydrogen,
            plan,
            model: MilpModel::new(name, ObjSense::Minimize),
        })
    }

    fn build(mut self) -> Result<MilpModel, BuildError> {
        self.add_columns();
        self.add_balance_rows();
        self.add_curtailment_rows();
        self.add_dc_rows();
        self.add_candidate_line_rows();
        if self.hydrogen {
            self.add_hydrogen_rows();
        }
        if self.plan.is_none() {
            self.add_logic_rows();
        }
        Ok(self.model)
    }

    fn idx(&self, key: VarKey) -> usize {
        self.model
            .col(key)
            .expect("referenced column exists by construction")
    }

    fn line_online(&self, k: usize, p: usize) -> bool {
        self.plan.is_none_or(|pl| pl.line_online[k][p])
    }

    fn route_online(&self, h: usize, p: usize) -> bool {
        self.plan.is_none_or(|pl| pl.h_online[h][p])
    }

    fn add_columns(&mut self) {
        let case = self.case;
        let horizon = case.horizon.clone();
        let gen_weight = horizon.hour_weight() * case.mva_base;

        for kind in [UnitKind::Existing, UnitKind::New] {
            for g in case.generators.iter().filter(|g| g.kind == kind) {
                for (p, d, t) in horizon.hours() {
                    let (lo, hi) = g.bounds_in_period(p);
                    let key = match kind {
                        UnitKind::Existing => VarKey::GenExisting { gen: g.id, p, d, t },
                        UnitKind::New => VarKey::GenNew { gen: g.id, p, d, t },
                    };
                    self.model
                        .add_var(key, lo, hi, gen_weight * g.energy_cost, false);
                }
            }
        }

        for kind in [UnitKind::Existing, UnitKind::New] {
            for r in case.renewables.iter().filter(|r| r.kind == kind) {
                for (p, d, t) in horizon.hours() {
                    let key = match kind {
                        UnitKind::Existing => VarKey::RenOut { plant: r.id, p, d, t },
                        UnitKind::New => VarKey::RenNewOut { plant: r.id, p, d, t },
                    };
                    self.model
                        .add_var(key, r.p_min, r.availability.get(p, d, t), 0.0, false);
                }
            }
        }
        for kind in [UnitKind::Existing, UnitKind::New] {
            for r in case.renewables.iter().filter(|r| r.kind == kind) {
                for (p, d, t) in horizon.hours() {
                    let key = match kind {
                        UnitKind::Existing => VarKey::RenCur { plant: r.id, p, d, t },
                        UnitKind::New => VarKey::RenNewCur { plant: r.id, p, d, t },
                    };
                    self.model.add_var(key, 0.0, f64::INFINITY, 0.0, false);
                }
            }
        }

        for l in &case.lines {
            for (p, d, t) in horizon.hours() {
                let r = l.rating.get(p, d, t);
                self.model
                    .add_var(VarKey::FlowLine { line: l.id, p, d, t }, -r, r, 0.0, false);
            }
        }
        for (k, c) in case.candidate_lines.iter().enumerate() {
            for (p, d, t) in horizon.hours() {
                let r = if self.line_online(k, p) {
                    c.rating.get(p, d, t)
                } else {
                    0.0
                };
                self.model
                    .add_var(VarKey::FlowNewLine { line: c.id, p, d, t }, -r, r, 0.0, false);
            }
        }

        let slack = case.slack_index().expect("validated case has a slack bus");
        for (i, b) in case.buses.iter().enumerate() {
            for (p, d, t) in horizon.hours() {
                let bound = if i == slack { 0.0 } else { case.angle_bound };
                self.model
                    .add_var(VarKey::Angle { bus: b.id, p, d, t }, -bound, bound, 0.0, false);
            }
        }
        for (i, b) in case.buses.iter().enumerate() {
            for (p, d, t) in horizon.hours() {
                let load = case.load.by_bus[i].get(p, d, t);
                self.model.add_var(
                    VarKey::Shed { bus: b.id, p, d, t },
                    0.0,
                    load,
                    case.shed_penalty,
                    false,
                );
            }
        }

        if self.hydrogen {
            for (h, rt) in case.hydrogen_routes.iter().enumerate() {
                for (p, d, t) in horizon.hours() {
                    let cap = if self.route_online(h, p) {
                        rt.pipeline_capacity
                    } else {
                        0.0
                    };
                    self.model
                        .add_var(VarKey::HFlow { route: rt.id, p, d, t }, 0.0, cap, 0.0, false);
                }
            }
            for (h, rt) in case.hydrogen_routes.iter().enumerate() {
                for (p, d, t) in horizon.hours() {
                    let cap = if self.route_online(h, p) {
                        rt.electrolyzer_rating
                    } else {
                        0.0
                    };
                    self.model
                        .add_var(VarKey::PElec { route: rt.id, p, d, t }, 0.0, cap, 0.0, false);
                }
            }
            for (h, rt) in case.hydrogen_routes.iter().enumerate() {
                for (p, d, t) in horizon.hours() {
                    let cap = if self.route_online(h, p) {
                        rt.fuelcell_rating
                    } else {
                        0.0
                    };
                    self.model.add_var(
                        VarKey::PFuelCell { route: rt.id, p, d, t },
                        0.0,
                        cap,
                        0.0,
                        false,
                    );
                }
            }
            for (h, rt) in case.hydrogen_routes.iter().enumerate() {
                for (p, d, t) in horizon.hours() {
                    let cap = if self.route_online(h, p) {
                        f64::INFINITY
                    } else {
                        0.0
                    };
                    self.model
                        .add_var(VarKey::PComp { route: rt.id, p, d, t }, 0.0, cap, 0.0, false);
                }
            }
        }

        if self.plan.is_none() {
            for c in &case.candidate_lines {
                for p in 0..horizon.n_periods {
                    let cost = line_investment_cost(&horizon, c, p);
                    self.model
                        .add_var(VarKey::BuildLine { line: c.id, p }, 0.0, 1.0, cost, true);
                }
            }
            for c in &case.candidate_lines {
                for p in 0..horizon.n_periods {
                    self.model
                        .add_var(VarKey::OnlineLine { line: c.id, p }, 0.0, 1.0, 0.0, true);
                }
            }
            if self.hydrogen {
                for rt in &case.hydrogen_routes {
                    for p in 0..horizon.n_periods {
                        let cost = hydrogen_investment_cost(&horizon, rt, p);
                        self.model
                            .add_var(VarKey::BuildH { route: rt.id, p }, 0.0, 1.0, cost, true);
                    }
                }
                for rt in &case.hydrogen_routes {
                    for p in 0..horizon.n_periods {
                        self.model
                            .add_var(VarKey::OnlineH { route: rt.id, p }, 0.0, 1.0, 0.0, true);
                    }
                }
            }
        }
    }

    fn add_balance_rows(&mut self) {
        let case = self.case;
        let horizon = case.horizon.clone();
        for (i, bus) in case.buses.iter().enumerate() {
            let n = bus.id;
            for (p, d, t) in horizon.hours() {
                let mut coeffs: Vec<(usize, f64)> = Vec::new();
                for l in &case.lines {
                    if l.to_bus == n {
                        coeffs.push((self.idx(VarKey::FlowLine { line: l.id, p, d, t }), 1.0));
                    }
                    if l.from_bus == n {
                        coeffs.push((self.idx(VarKey::FlowLine { line: l.id, p, d, t }), -1.0));
                    }
                }
                for c in &case.candidate_lines {
                    if c.to_bus == n {
                        coeffs.push((self.idx(VarKey::FlowNewLine { line: c.id, p, d, t }), 1.0));
                    }
                    if c.from_bus == n {
                        coeffs.push((self.idx(VarKey::FlowNewLine { line: c.id, p, d, t }), -1.0));
                    }
                }
                for g in case.generators.iter().filter(|g| g.bus == n) {
                    let key = match g.kind {
                        UnitKind::Existing => VarKey::GenExisting { gen: g.id, p, d, t },
                        UnitKind::New => VarKey::GenNew { gen: g.id, p, d, t },
                    };
                    coeffs.push((self.idx(key), 1.0));
                }
                for r in case.renewables.iter().filter(|r| r.bus == n) {
                    let (out, cur) = match r.kind {
                        UnitKind::Existing => (
                            VarKey::RenOut { plant: r.id, p, d, t },
                            VarKey::RenCur { plant: r.id, p, d, t },
                        ),
                        UnitKind::New => (
                            VarKey::RenNewOut { plant: r.id, p, d, t },
                            VarKey::RenNewCur { plant: r.id, p, d, t },
                        ),
                    };
                    coeffs.push((self.idx(out), 1.0));
                    coeffs.push((self.idx(cur), -1.0));
                }
                if self.hydrogen {
                    for rt in &case.hydrogen_routes {
                        if rt.to_bus == n {
                            coeffs.push((self.idx(VarKey::PFuelCell { route: rt.id, p, d, t }), 1.0));
                        }
                        if rt.from_bus == n {
                            coeffs.push((self.idx(VarKey::PElec { route: rt.id, p, d, t }), -1.0));
                            coeffs.push((self.idx(VarKey::PComp { route: rt.id, p, d, t }), -1.0));
                        }
                    }
                }
                coeffs.push((self.idx(VarKey::Shed { bus: n, p, d, t }), 1.0));
                let rhs = case.load.by_bus[i].get(p, d, t);
                self.model
                    .add_row(format!("bal[{n},{t},{d},{p}]"), coeffs, RowSense::Eq, rhs);
            }
        }
    }

    fn add_curtailment_rows(&mut self) {
        let case = self.case;
        let horizon = case.horizon.clone();
        for r in &case.renewables {
            for (p, d, t) in horizon.hours() {
                let (out, cur, prefix) = match r.kind {
                    UnitKind::Existing => (
                        VarKey::RenOut { plant: r.id, p, d, t },
                        VarKey::RenCur { plant: r.id, p, d, t },
                        "rcur",
                    ),
                    UnitKind::New => (
                        VarKey::RenNewOut { plant: r.id, p, d, t },
                        VarKey::RenNewCur { plant: r.id, p, d, t },
                        "nrcur",
                    ),
                };
                let coeffs = vec![(self.idx(cur), 1.0), (self.idx(out), -1.0)];
                self.model.add_row(
                    format!("{prefix}[{},{t},{d},{p}]", r.id),
                    coeffs,
                    RowSense::Le,
                    0.0,
                );
            }
        }
    }

    fn add_dc_rows(&mut self) {
        let case = self.case;
        let horizon = case.horizon.clone();
        for l in &case.lines {
            let a = 1.0 / l.reactance;
            for (p, d, t) in horizon.hours() {
                let coeffs = vec![
                    (self.idx(VarKey::FlowLine { line: l.id, p, d, t }), 1.0),
                    (self.idx(VarKey::Angle { bus: l.from_bus, p, d, t }), -a),
                    (self.idx(VarKey::Angle { bus: l.to_bus, p, d, t }), a),
                ];
                self.model.add_row(
                    format!("dc[{},{t},{d},{p}]", l.id),
                    coeffs,
                    RowSense::Eq,
                    0.0,
                );
            }
        }
    }

    fn add_candidate_line_rows(&mut self) {
        let case = self.case;
        let horizon = case.horizon.clone();
        for (k, c) in case.candidate_lines.iter().enumerate() {
            let a = 1.0 / c.reactance;
            // Tightest valid disjunction constant: the angle spread cannot
            // exceed 2 * angle_bound.
            let big_m = 2.0 * case.angle_bound * a;
            for (p, d, t) in horizon.hours() {
                let flow = self.idx(VarKey::FlowNewLine { line: c.id, p, d, t });
                let th_f = self.idx(VarKey::Angle { bus: c.from_bus, p, d, t });
                let th_t = self.idx(VarKey::Angle { bus: c.to_bus, p, d, t });
                match self.plan {
                    None => {
                        let u = self.idx(VarKey::OnlineLine { line: c.id, p });
                        self.model.add_row(
                            format!("bmu[{},{t},{d},{p}]", c.id),
                            vec![(flow, 1.0), (th_f, -a), (th_t, a), (u, big_m)],
                            RowSense::Le,
                            big_m,
                        );
                        self.model.add_row(
                            format!("bml[{},{t},{d},{p}]", c.id),
                            vec![(flow, 1.0), (th_f, -a), (th_t, a), (u, -big_m)],
                            RowSense::Ge,
                            -big_m,
                        );
                        let r = c.rating.get(p, d, t);
                        self.model.add_row(
                            format!("ffu[{},{t},{d},{p}]", c.id),
                            vec![(flow, 1.0), (u, -r)],
                            RowSense::Le,
                            0.0,
                        );
                        self.model.add_row(
                            format!("ffl[{},{t},{d},{p}]", c.id),
                            vec![(flow, 1.0), (u, r)],
                            RowSense::Ge,
                            0.0,
                        );
                    }
                    Some(_) if self.line_online(k, p) => {
                        self.model.add_row(
                            format!("dcn[{},{t},{d},{p}]", c.id),
                            vec![(flow, 1.0), (th_f, -a), (th_t, a)],
                            RowSense::Eq,
                            0.0,
                        );
                    }
                    // Offline: the flow column is fixed to zero by bounds
                    // and the angle coupling does not apply.
                    Some(_) => {}
                }
            }
        }
    }

    fn add_hydrogen_rows(&mut self) {
        let case = self.case;
        let horizon = case.horizon.clone();
        let b = case.mva_base;
        for rt in &case.hydrogen_routes {
            for (p, d, t) in horizon.hours() {
                let hf = self.idx(VarKey::HFlow { route: rt.id, p, d, t });
                let pe = self.idx(VarKey::PElec { route: rt.id, p, d, t });
                let pf = self.idx(VarKey::PFuelCell { route: rt.id, p, d, t });
                let pc = self.idx(VarKey::PComp { route: rt.id, p, d, t });
                // eta_e * pE * B = h
                self.model.add_row(
                    format!("elec[{},{t},{d},{p}]", rt.id),
                    vec![(pe, rt.eta_e * b), (hf, -1.0)],
                    RowSense::Eq,
                    0.0,
                );
                // pF * B = eta_f * h
                self.model.add_row(
                    format!("fcell[{},{t},{d},{p}]", rt.id),
                    vec![(pf, b), (hf, -rt.eta_f)],
                    RowSense::Eq,
                    0.0,
                );
                // eta_c * h = pC * B
                self.model.add_row(
                    format!("compr[{},{t},{d},{p}]", rt.id),
                    vec![(hf, rt.eta_c), (pc, -b)],
                    RowSense::Eq,
                    0.0,
                );
                if self.plan.is_none() {
                    let u = self.idx(VarKey::OnlineH { route: rt.id, p });
                    self.model.add_row(
                        format!("hcap[{},{t},{d},{p}]", rt.id),
                        vec![(hf, 1.0), (u, -rt.pipeline_capacity)],
                        RowSense::Le,
                        0.0,
                    );
                    self.model.add_row(
                        format!("ecap[{},{t},{d},{p}]", rt.id),
                        vec![(pe, 1.0), (u, -rt.electrolyzer_rating)],
                        RowSense::Le,
                        0.0,
                    );
                    self.model.add_row(
                        format!("fcap[{},{t},{d},{p}]", rt.id),
                        vec![(pf, 1.0), (u, -rt.fuelcell_rating)],
                        RowSense::Le,
                        0.0,
                    );
                }
            }
        }
    }

    /// Build/online coupling. The cumulative form sum_{p' <= p} v <= u_p
    /// combined with the step inequalities pins u_p = sum_{p' <= p} v_p',
    /// which gives monotone online status and at most one build event.
    fn add_logic_rows(&mut self) {
        let n_periods = self.case.horizon.n_periods;
        for c in &self.case.candidate_lines {
            let build = |p| VarKey::BuildLine { line: c.id, p };
            let online = |p| VarKey::OnlineLine { line: c.id, p };
            self.logic_rows_for("l", c.id, n_periods, &build, &online);
        }
        if self.hydrogen {
            for rt in &self.case.hydrogen_routes {
                let build = |p| VarKey::BuildH { route: rt.id, p };
                let online = |p| VarKey::OnlineH { route: rt.id, p };
                self.logic_rows_for("h", rt.id, n_periods, &build, &online);
            }
        }
    }

    fn logic_rows_for(
        &mut self,
        prefix: &str,
        id: usize,
        n_periods: usize,
        build: &dyn Fn(usize) -> VarKey,
        online: &dyn Fn(usize) -> VarKey,
    ) {
        for p in 0..n_periods {
            let mut coeffs: Vec<(usize, f64)> =
                (0..=p).map(|q| (self.idx(build(q)), 1.0)).collect();
            coeffs.push((self.idx(online(p)), -1.0));
            self.model
                .add_row(format!("{prefix}cum[{id},{p}]"), coeffs, RowSense::Le, 0.0);
        }
        for p in 1..n_periods {
            let coeffs = vec![
                (self.idx(build(p)), 1.0),
                (self.idx(online(p)), -1.0),
                (self.idx(online(p - 1)), 1.0),
            ];
            self.model
                .add_row(format!("{prefix}step[{id},{p}]"), coeffs, RowSense::Ge, 0.0);
        }
        let coeffs = vec![(self.idx(build(0)), 1.0), (self.idx(online(0)), -1.0)];
        self.model
            .add_row(format!("{prefix}init[{id}]"), coeffs, RowSense::Eq, 0.0);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BreakdownError {
    DimensionMismatch { expected: usize, found: usize },
}

impl core::fmt::Display for BreakdownError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BreakdownError::DimensionMismatch { expected, found } => write!(
                f,
                "solution has {found} values but the model has {expected} columns"
            ),
        }
    }
}

/// Decompose a solution of a model built by this module into the four cost
/// components, evaluated from case parameters (not the model's coefficient
/// table). The total reproduces the model objective.
pub fn cost_breakdown(
    model: &MilpModel,
    values: &[f64],
    case: &NetworkCase,
) -> Result<CostBreakdown, BreakdownError> {
    if values.len() != model.columns.len() {
        return Err(BreakdownError::DimensionMismatch {
            expected: model.columns.len(),
            found: values.len(),
        });
    }
    let gen_weight = case.horizon.hour_weight() * case.mva_base;
    let mut generation = 0.0;
    let mut new_lines = 0.0;
    let mut hydrogen = 0.0;
    let mut shed = 0.0;
    for (key, &j) in &model.var_index {
        let x = values[j];
        match *key {
            VarKey::GenExisting { gen, .. } | VarKey::GenNew { gen, .. } => {
                let g = case
                    .generators
                    .iter()
                    .find(|g| g.id == gen)
                    .expect("model variable references a case generator");
                generation += gen_weight * g.energy_cost * x;
            }
            VarKey::BuildLine { line, p } => {
                let c = case
                    .candidate_lines
                    .iter()
                    .find(|c| c.id == line)
                    .expect("model variable references a candidate line");
                new_lines += x * line_investment_cost(&case.horizon, c, p);
            }
            VarKey::BuildH { route, p } => {
                let rt = case
                    .hydrogen_routes
                    .iter()
                    .find(|r| r.id == route)
                    .expect("model variable references a hydrogen route");
                hydrogen += x * hydrogen_investment_cost(&case.horizon, rt, p);
            }
            VarKey::Shed { .. } => shed += case.shed_penalty * x,
            _ => {}
        }
    }
    Ok(CostBreakdown::new(generation, new_lines, hydrogen, shed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{three_bus_case, two_bus_case};
    use crate::grid::HourlyProfile;
    use alloc::collections::BTreeSet;

    #[test]
    fn two_bus_column_count_matches_hand_enumeration() {
        // Hand enumeration for 1 period x 1 day x 1 hour:
        //   1 pG + 1 pR + 1 pRCUR + 1 pL + 2 theta + 2 pSD
        //   + 4 hydrogen chain (hH, pE, pF, pC) + vH + uH
        let model = build_tep_h(&two_bus_case()).unwrap();
        assert_eq!(model.columns.len(), 14);
        assert_eq!(model.n_integer(), 2);
        assert_eq!(model.var_index.len(), model.columns.len());
    }

    #[test]
    fn names_are_unique_and_mapped() {
        let model = build_tep_h(&three_bus_case()).unwrap();
        let names: BTreeSet<_> = model.columns.iter().map(|c| c.name.clone()).collect();
        assert_eq!(names.len(), model.columns.len());
        let row_names: BTreeSet<_> = model.rows.iter().map(|r| r.name.clone()).collect();
        assert_eq!(row_names.len(), model.rows.len());
        // var_index is a bijection onto column positions.
        let mapped: BTreeSet<_> = model.var_index.values().copied().collect();
        assert_eq!(mapped.len(), model.columns.len());
        for (key, &j) in &model.var_index {
            assert_eq!(model.columns[j].name, key.name());
        }
    }

    #[test]
    fn zero_candidate_model_has_no_binaries() {
        let mut case = two_bus_case();
        case.hydrogen_routes.clear();
        let model = build_tep_h(&case).unwrap();
        assert_eq!(model.n_integer(), 0);
        // Objective reduces to generation cost plus shedding penalty.
        for (key, &j) in &model.var_index {
            let coef = model.columns[j].objective;
            match key {
                VarKey::GenExisting { .. } | VarKey::GenNew { .. } | VarKey::Shed { .. } => {
                    assert!(coef > 0.0)
                }
                _ => assert_eq!(coef, 0.0, "{}", key.name()),
            }
        }
    }

    #[test]
    fn tep_t_equals_tep_h_without_hydrogen() {
        let mut case = two_bus_case();
        case.hydrogen_routes.clear();
        let h = build_tep_h(&case).unwrap();
        let mut t = build_tep_t(&case).unwrap();
        t.name = h.name.clone();
        assert_eq!(h, t);
    }

    #[test]
    fn two_bus_tep_t_has_no_binaries() {
        let model = build_tep_t(&two_bus_case()).unwrap();
        assert_eq!(model.n_integer(), 0);
        assert!(model.col(VarKey::HFlow { route: 1, p: 0, d: 0, t: 0 }).is_none());
    }

    #[test]
    fn conversion_rows_compose_to_round_trip() {
        let mut case = two_bus_case();
        case.hydrogen_routes[0].eta_e = 0.6;
        case.hydrogen_routes[0].eta_f = 0.8;
        let model = build_tep_h(&case).unwrap();
        let pe = model.col(VarKey::PElec { route: 1, p: 0, d: 0, t: 0 }).unwrap();
        let pf = model.col(VarKey::PFuelCell { route: 1, p: 0, d: 0, t: 0 }).unwrap();
        let hf = model.col(VarKey::HFlow { route: 1, p: 0, d: 0, t: 0 }).unwrap();
        let elec = model.rows.iter().find(|r| r.name == "elec[1,0,0,0]").unwrap();
        let fcell = model.rows.iter().find(|r| r.name == "fcell[1,0,0,0]").unwrap();
        let coeff = |row: &Row, j: usize| {
            row.coeffs
                .iter()
                .find(|&&(c, _)| c == j)
                .map(|&(_, a)| a)
                .unwrap()
        };
        // From elec: h = a_e * pE; from fcell: pF = (-b_h / b_f) * h.
        let a_e = coeff(elec, pe) / -coeff(elec, hf);
        let ratio = (-coeff(fcell, hf) / coeff(fcell, pf)) * a_e;
        assert!((ratio - 0.48).abs() < 1e-12, "round trip {ratio}");
    }

    #[test]
    fn maintenance_multiplier_follows_build_period() {
        let case = three_bus_case();
        let model = build_tep_h(&case).unwrap();
        let c = &case.candidate_lines[0];
        let ny = case.horizon.years_per_period as f64;
        let np = case.horizon.n_periods;
        for p in 0..np {
            let j = model.col(VarKey::BuildLine { line: c.id, p }).unwrap();
            let expect =
                c.capital_cost * (1.0 + (np - p) as f64 * c.maintenance_ratio * ny);
            assert!((model.columns[j].objective - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn line_investment_direct_substitution() {
        // C = 100, R^M = 0.02/yr, N^P = 3, N^Y = 5, built in the second
        // period: 100 * (1 + 2*0.02*5) = 120.
        let horizon = PlanningHorizon {
            n_periods: 3,
            years_per_period: 5,
            typical_days_per_year: 1,
            intervals_per_day: 1,
            period_labels: alloc::vec!["a".into(), "b".into(), "c".into()],
        };
        let line = CandidateLine {
            id: 0,
            from_bus: 0,
            to_bus: 1,
            reactance: 0.1,
            rating: HourlyProfile::filled(3, 1, 1, 1.0),
            capital_cost: 100.0,
            maintenance_ratio: 0.02,
        };
        let got = line_investment_cost(&horizon, &line, 1);
        assert!((got - 120.0).abs() / 120.0 < 1e-9);
    }

    #[test]
    fn hydrogen_investment_direct_substitution() {
        // C^H = 2000, C^E = 30, C^F = 35, R^MH = 0.01/yr, N^P = 6, N^Y = 5,
        // built in the first period: 2000 * (1 + 6*0.01*5) + 30 + 35 = 2665.
        let horizon = PlanningHorizon {
            n_periods: 6,
            years_per_period: 5,
            typical_days_per_year: 1,
            intervals_per_day: 1,
            period_labels: (0..6).map(|i| format!("p{i}")).collect(),
        };
        let route = HydrogenRoute {
            id: 0,
            from_bus: 0,
            to_bus: 1,
            pipeline_capacity: 1.0,
            electrolyzer_rating: 1.0,
            fuelcell_rating: 1.0,
            eta_e: 0.8,
            eta_f: 0.625,
            eta_c: 0.0,
            pipeline_cost: 2000.0,
            electrolyzer_cost: 30.0,
            fuelcell_cost: 35.0,
            maintenance_ratio: 0.01,
        };
        let got = hydrogen_investment_cost(&horizon, &route, 0);
        assert!((got - 2665.0).abs() / 2665.0 < 1e-9);
    }

    #[test]
    fn big_m_is_twice_angle_bound_over_reactance() {
        let case = three_bus_case();
        let model = build_tep_h(&case).unwrap();
        let c = &case.candidate_lines[0];
        let u = model.col(VarKey::OnlineLine { line: c.id, p: 0 }).unwrap();
        let row = model
            .rows
            .iter()
            .find(|r| r.name.starts_with(&format!("bmu[{},", c.id)))
            .unwrap();
        let m = row.coeffs.iter().find(|&&(j, _)| j == u).unwrap().1;
        assert!((m - 2.0 * case.angle_bound / c.reactance).abs() < 1e-12);
        assert!((row.rhs - m).abs() < 1e-12);
    }

    #[test]
    fn operation_lp_fixes_offline_columns() {
        let case = two_bus_case();
        let offline = InvestmentPlan::empty(0, 1, 1);
        let model = build_operation_lp(&case, &offline).unwrap();
        assert_eq!(model.n_integer(), 0);
        for key in [
            VarKey::HFlow { route: 1, p: 0, d: 0, t: 0 },
            VarKey::PElec { route: 1, p: 0, d: 0, t: 0 },
            VarKey::PFuelCell { route: 1, p: 0, d: 0, t: 0 },
            VarKey::PComp { route: 1, p: 0, d: 0, t: 0 },
        ] {
            let j = model.col(key).unwrap();
            assert_eq!((model.columns[j].lower, model.columns[j].upper), (0.0, 0.0));
        }
        // No cap or logic rows in operation mode.
        assert!(model.rows.iter().all(|r| !r.name.starts_with("hcap")
            && !r.name.starts_with("hcum")
            && !r.name.starts_with("hinit")));
    }

    #[test]
    fn operation_lp_hardens_online_candidate_to_equality() {
        let case = three_bus_case();
        let plan = InvestmentPlan::from_build_periods(&[Some(0)], &[None], 2);
        let model = build_operation_lp(&case, &plan).unwrap();
        let c = &case.candidate_lines[0];
        let dcn: Vec<_> = model
            .rows
            .iter()
            .filter(|r| r.name.starts_with(&format!("dcn[{},", c.id)))
            .collect();
        assert_eq!(dcn.len(), case.horizon.n_hours());
        assert!(dcn.iter().all(|r| r.sense == RowSense::Eq));
        assert!(model.rows.iter().all(|r| !r.name.starts_with("bmu")));
    }

    #[test]
    fn operation_lp_rejects_inconsistent_plan() {
        let case = two_bus_case();
        let mut plan = InvestmentPlan::empty(0, 1, 1);
        plan.h_online[0][0] = true; // online without a build event
        assert!(matches!(
            build_operation_lp(&case, &plan),
            Err(BuildError::BadPlan(_))
        ));
    }

    #[test]
    fn invalid_case_is_rejected() {
        let mut case = two_bus_case();
        case.hydrogen_routes[0].eta_e = 1.5;
        assert!(matches!(
            build_tep_h(&case),
            Err(BuildError::InvalidCase(_))
        ));
    }

    #[test]
    fn balance_row_structure_two_bus() {
        let case = two_bus_case();
        let model = build_tep_h(&case).unwrap();
        let row = model.rows.iter().find(|r| r.name == "bal[2,0,0,0]").unwrap();
        assert_eq!(row.sense, RowSense::Eq);
        assert!((row.rhs - 14.5).abs() < 1e-12);
        let flow = model.col(VarKey::FlowLine { line: 1, p: 0, d: 0, t: 0 }).unwrap();
        let pf = model.col(VarKey::PFuelCell { route: 1, p: 0, d: 0, t: 0 }).unwrap();
        let shed = model.col(VarKey::Shed { bus: 2, p: 0, d: 0, t: 0 }).unwrap();
        let coeff = |j| row.coeffs.iter().find(|&&(c, _)| c == j).map(|&(_, a)| a);
        assert_eq!(coeff(flow), Some(1.0)); // line 1->2 delivers into bus 2
        assert_eq!(coeff(pf), Some(1.0));
        assert_eq!(coeff(shed), Some(1.0));
    }

    #[test]
    fn slack_angle_fixed_to_zero() {
        let case = two_bus_case();
        let model = build_tep_h(&case).unwrap();
        let j = model.col(VarKey::Angle { bus: 1, p: 0, d: 0, t: 0 }).unwrap();
        assert_eq!((model.columns[j].lower, model.columns[j].upper), (0.0, 0.0));
        let k = model.col(VarKey::Angle { bus: 2, p: 0, d: 0, t: 0 }).unwrap();
        assert_eq!(model.columns[k].upper, case.angle_bound);
    }

    #[test]
    fn cost_breakdown_matches_objective() {
        let case = three_bus_case();
        let model = build_tep_h(&case).unwrap();
        // Synthetic point: all columns at lower bound except one build pair.
        let mut x: Vec<f64> = model.columns.iter().map(|c| c.lower).collect();
        if let Some(j) = model.col(VarKey::BuildLine { line: case.candidate_lines[0].id, p: 0 }) {
            x[j] = 1.0;
        }
        let bd = cost_breakdown(&model, &x, &case).unwrap();
        let obj = model.objective_value(&x);
        assert!((bd.total - obj).abs() <= 1e-6 * obj.abs().max(1.0));
        assert!(bd.new_lines > 0.0);
        assert_eq!(bd.hydrogen, 0.0);
    }

    #[test]
    fn cost_breakdown_rejects_wrong_length() {
        let case = two_bus_case();
        let model = build_tep_h(&case).unwrap();
        let x = alloc::vec![0.0; model.columns.len() + 1];
        assert!(matches!(
            cost_breakdown(&model, &x, &case),
            Err(BreakdownError::DimensionMismatch { .. })
        ));
    }
}
