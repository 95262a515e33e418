//! Domain model for a hybrid electric/hydrogen transmission grid.
//!
//! A [`NetworkCase`] describes buses, thermal and renewable generation,
//! existing and candidate transmission lines, candidate hydrogen routes
//! (pipeline + electrolyzer + fuel cell + compressor), hourly load and
//! rating profiles over a multi-period planning horizon, and the penalty
//! weights used by the planning objective.
//!
//! All electrical quantities are stored per-unit on [`NetworkCase::mva_base`].
//! Hydrogen pipeline flows are in MWh of hydrogen per hour. Costs are in
//! million currency units (capital) or million currency units per MWh
//! (energy costs).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Planning horizon: `n_periods` future periods of `years_per_period` years,
/// each year represented by `typical_days_per_year` typical days of
/// `intervals_per_day` hourly intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanningHorizon {
    pub n_periods: usize,
    pub years_per_period: u32,
    pub typical_days_per_year: usize,
    pub intervals_per_day: usize,
    /// One label per period, e.g. "2021-2025".
    pub period_labels: Vec<String>,
}

impl PlanningHorizon {
    /// Calendar days represented by one typical day (365 / N^D).
    pub fn day_weight(&self) -> f64 {
        365.0 / self.typical_days_per_year as f64
    }

    /// Objective weight of one modeled hour: years per period times the
    /// typical-day weight.
    pub fn hour_weight(&self) -> f64 {
        self.years_per_period as f64 * self.day_weight()
    }

    /// Total number of (period, day, hour) index tuples.
    pub fn n_hours(&self) -> usize {
        self.n_periods * self.typical_days_per_year * self.intervals_per_day
    }

    /// Iterate over all (period, day, hour) tuples in canonical order.
    pub fn hours(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let days = self.typical_days_per_year;
        let hours = self.intervals_per_day;
        (0..self.n_periods).flat_map(move |p| {
            (0..days).flat_map(move |d| (0..hours).map(move |t| (p, d, t)))
        })
    }
}

/// Hourly values over the whole horizon, indexed (period, day, hour).
#[derive(Clone, Debug, PartialEq)]
pub struct HourlyProfile {
    periods: usize,
    days: usize,
    hours: usize,
    data: Vec<f64>,
}

impl HourlyProfile {
    pub fn new(periods: usize, days: usize, hours: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == periods * days * hours).then_some(Self {
            periods,
            days,
            hours,
            data,
        })
    }

    pub fn filled(periods: usize, days: usize, hours: usize, value: f64) -> Self {
        Self {
            periods,
            days,
            hours,
            data: vec![value; periods * days * hours],
        }
    }

    pub fn zeros(horizon: &PlanningHorizon) -> Self {
        Self::filled(
            horizon.n_periods,
            horizon.typical_days_per_year,
            horizon.intervals_per_day,
            0.0,
        )
    }

    pub fn from_fn(
        horizon: &PlanningHorizon,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut out = Self::zeros(horizon);
        for (p, d, t) in horizon.hours() {
            let v = f(p, d, t);
            out.set(p, d, t, v);
        }
        out
    }

    #[inline]
    fn offset(&self, p: usize, d: usize, t: usize) -> usize {
        debug_assert!(p < self.periods && d < self.days && t < self.hours);
        (p * self.days + d) * self.hours + t
    }

    #[inline]
    pub fn get(&self, p: usize, d: usize, t: usize) -> f64 {
        self.data[self.offset(p, d, t)]
    }

    #[inline]
    pub fn set(&mut self, p: usize, d: usize, t: usize, value: f64) {
        let i = self.offset(p, d, t);
        self.data[i] = value;
    }

    pub fn matches(&self, horizon: &PlanningHorizon) -> bool {
        self.periods == horizon.n_periods
            && self.days == horizon.typical_days_per_year
            && self.hours == horizon.intervals_per_day
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Elementwise scaling; zeros stay zero.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            periods: self.periods,
            days: self.days,
            hours: self.hours,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.periods, self.days, self.hours)
    }
}

/// Existing asset vs. candidate/new asset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitKind {
    Existing,
    New,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bus {
    pub id: usize,
    pub name: String,
    pub is_slack: bool,
}

/// Thermal generator. Existing units carry a static output range; new units
/// carry one range per period. `retire_period` marks the first period in
/// which the unit is no longer online (none = online throughout).
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalGenerator {
    pub id: usize,
    pub bus: usize,
    pub kind: UnitKind,
    pub p_min: f64,
    pub p_max: f64,
    pub per_period_limits: Vec<(f64, f64)>,
    /// Cost per MWh of output, in million currency units.
    pub energy_cost: f64,
    pub retire_period: Option<usize>,
}

impl ThermalGenerator {
    /// Dispatch bounds in period `p` (per-unit), accounting for kind and
    /// retirement.
    pub fn bounds_in_period(&self, p: usize) -> (f64, f64) {
        if self.retire_period.is_some_and(|r| p >= r) {
            return (0.0, 0.0);
        }
        match self.kind {
            UnitKind::Existing => (self.p_min, self.p_max),
            UnitKind::New => self.per_period_limits[p],
        }
    }
}

/// Renewable plant with an hourly availability profile (the upper output
/// limit for each modeled hour).
#[derive(Clone, Debug, PartialEq)]
pub struct RenewablePlant {
    pub id: usize,
    pub bus: usize,
    pub kind: UnitKind,
    pub p_min: f64,
    pub availability: HourlyProfile,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionLine {
    pub id: usize,
    pub from_bus: usize,
    pub to_bus: usize,
    /// Series reactance, per-unit.
    pub reactance: f64,
    /// Dynamic line rating per hour, per-unit.
    pub rating: HourlyProfile,
}

/// Candidate transmission line with capital cost and a yearly maintenance
/// ratio applied from the build period onward.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateLine {
    pub id: usize,
    pub from_bus: usize,
    pub to_bus: usize,
    pub reactance: f64,
    pub rating: HourlyProfile,
    /// Capital cost, million currency units.
    pub capital_cost: f64,
    /// Maintenance cost per year as a fraction of capital cost.
    pub maintenance_ratio: f64,
}

/// Candidate hydrogen transmission route: electrolyzer and compressor at
/// `from_bus`, pipeline to a fuel cell at `to_bus`.
#[derive(Clone, Debug, PartialEq)]
pub struct HydrogenRoute {
    pub id: usize,
    pub from_bus: usize,
    pub to_bus: usize,
    /// Pipeline capacity, MWh of hydrogen per hour.
    pub pipeline_capacity: f64,
    /// Electrolyzer power rating, per-unit.
    pub electrolyzer_rating: f64,
    /// Fuel-cell power rating, per-unit.
    pub fuelcell_rating: f64,
    /// Electrolyzer conversion efficiency, in (0, 1].
    pub eta_e: f64,
    /// Fuel-cell conversion efficiency, in (0, 1].
    pub eta_f: f64,
    /// Compressor power per unit of hydrogen flow, dimensionless, >= 0.
    pub eta_c: f64,
    /// Pipeline capital cost, million currency units.
    pub pipeline_cost: f64,
    pub electrolyzer_cost: f64,
    pub fuelcell_cost: f64,
    /// Yearly maintenance ratio on the pipeline capital cost.
    pub maintenance_ratio: f64,
}

impl HydrogenRoute {
    /// Electric-to-hydrogen-to-electric conversion product.
    pub fn round_trip(&self) -> f64 {
        self.eta_e * self.eta_f
    }
}

/// Demand per bus per hour, aligned with `NetworkCase::buses` order.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadProfile {
    pub by_bus: Vec<HourlyProfile>,
}

/// A complete planning case.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkCase {
    pub mva_base: f64,
    pub horizon: PlanningHorizon,
    pub buses: Vec<Bus>,
    pub generators: Vec<ThermalGenerator>,
    pub renewables: Vec<RenewablePlant>,
    pub lines: Vec<TransmissionLine>,
    pub candidate_lines: Vec<CandidateLine>,
    pub hydrogen_routes: Vec<HydrogenRoute>,
    pub load: LoadProfile,
    /// Objective weight on each per-unit MWh of load shedding.
    pub shed_penalty: f64,
    /// Symmetric bound on bus voltage angles, radians.
    pub angle_bound: f64,
}

/// A named rule violation found by [`NetworkCase::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub entity: String,
    pub rule: String,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

/// Error from a case transform.
#[derive(Clone, Debug, PartialEq)]
pub enum TransformError {
    /// Penetration target > 0 but the case has no renewable energy to scale.
    NoRenewableEnergy,
    /// Round-trip target is zero, negative or not finite, or a route has no
    /// positive round-trip efficiency to rescale.
    BadRoundTrip { target: f64 },
    /// Hitting the round-trip target would push a conversion efficiency
    /// above one.
    EfficiencyAboveOne { route: usize, target: f64 },
}

impl core::fmt::Display for TransformError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TransformError::NoRenewableEnergy => {
                write!(f, "penetration target unachievable: total renewable availability is zero")
            }
            TransformError::BadRoundTrip { target } => {
                write!(f, "round-trip target {target} is not a positive finite fraction")
            }
            TransformError::EfficiencyAboveOne { route, target } => write!(
                f,
                "round-trip target {target} needs an efficiency above 1 on route {route}"
            ),
        }
    }
}

impl NetworkCase {
    /// Position of the bus with the given id.
    pub fn bus_index(&self, id: usize) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    /// Position of the slack bus.
    pub fn slack_index(&self) -> Option<usize> {
        self.buses.iter().position(|b| b.is_slack)
    }

    /// Total load energy over the horizon, weighted by the typical-day
    /// weight (per-unit MWh-scale).
    pub fn load_energy(&self) -> f64 {
        self.horizon.day_weight() * self.load.by_bus.iter().map(HourlyProfile::sum).sum::<f64>()
    }

    /// Total available renewable energy over the horizon, same weighting as
    /// [`NetworkCase::load_energy`].
    pub fn renewable_energy(&self) -> f64 {
        self.horizon.day_weight()
            * self
                .renewables
                .iter()
                .map(|r| r.availability.sum())
                .sum::<f64>()
    }

    /// Check every type invariant; an empty list means the case is accepted
    /// by every model-building and evaluation operation.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let h = &self.horizon;
        if h.n_periods < 1 || h.typical_days_per_year < 1 || h.intervals_per_day < 1 {
            flag(&mut out, "horizon", "all counts must be >= 1");
        }
        if h.years_per_period < 1 {
            flag(&mut out, "horizon", "years_per_period must be >= 1");
        }
        if h.period_labels.len() != h.n_periods {
            flag(
                &mut out,
                "horizon",
                format!(
                    "period_labels length {} != n_periods {}",
                    h.period_labels.len(),
                    h.n_periods
                ),
            );
        }
        if self.mva_base <= 0.0 || self.mva_base.is_nan() {
            flag(&mut out, "case", "mva_base must be > 0");
        }
        if self.angle_bound <= 0.0 || self.angle_bound.is_nan() {
            flag(&mut out, "case", "angle_bound must be > 0");
        }

        let slack_count = self.buses.iter().filter(|b| b.is_slack).count();
        if slack_count != 1 {
            flag(
                &mut out,
                "buses",
                format!("exactly one slack bus required, found {slack_count}"),
            );
        }
        for (i, b) in self.buses.iter().enumerate() {
            if self.buses[..i].iter().any(|o| o.id == b.id) {
                flag(&mut out, format!("bus {}", b.id), "duplicate bus id");
            }
        }
        // Ids double as variable names, so each collection needs them unique.
        flag_duplicate_ids(&mut out, &self.generators, |g| g.id, "generator");
        flag_duplicate_ids(&mut out, &self.renewables, |r| r.id, "renewable");
        flag_duplicate_ids(&mut out, &self.lines, |l| l.id, "line");
        flag_duplicate_ids(&mut out, &self.candidate_lines, |c| c.id, "candidate line");
        flag_duplicate_ids(&mut out, &self.hydrogen_routes, |r| r.id, "hydrogen route");

        let bus_exists = |id: usize| self.buses.iter().any(|b| b.id == id);

        for g in &self.generators {
            let ent = format!("generator {}", g.id);
            if !bus_exists(g.bus) {
                flag(&mut out, ent.clone(), format!("unknown bus id {}", g.bus));
            }
            match g.kind {
                UnitKind::Existing => {
                    if !(0.0 <= g.p_min && g.p_min <= g.p_max) {
                        flag(&mut out, ent.clone(), "0 <= p_min <= p_max violated");
                    }
                }
                UnitKind::New => {
                    if g.per_period_limits.len() != h.n_periods {
                        flag(
                            &mut out,
                            ent.clone(),
                            format!(
                                "per_period_limits length {} != n_periods {}",
                                g.per_period_limits.len(),
                                h.n_periods
                            ),
                        );
                    }
                    for &(lo, hi) in &g.per_period_limits {
                        if !(0.0 <= lo && lo <= hi) {
                            flag(&mut out, ent.clone(), "0 <= p_min <= p_max violated");
                            break;
                        }
                    }
                }
            }
            if g.energy_cost < 0.0 {
                flag(&mut out, ent, "energy_cost must be >= 0");
            }
        }

        for r in &self.renewables {
            let ent = format!("renewable {}", r.id);
            if !bus_exists(r.bus) {
                flag(&mut out, ent.clone(), format!("unknown bus id {}", r.bus));
            }
            if !r.availability.matches(h) {
                flag(&mut out, ent.clone(), "availability tensor shape != horizon");
            } else if r.availability.min() < r.p_min {
                flag(&mut out, ent, "availability >= p_min violated");
            }
        }

        for l in &self.lines {
            let ent = format!("line {}", l.id);
            check_line(
                &mut out,
                ent,
                l.from_bus,
                l.to_bus,
                l.reactance,
                &l.rating,
                h,
                &bus_exists,
            );
        }
        for c in &self.candidate_lines {
            let ent = format!("candidate line {}", c.id);
            check_line(
                &mut out,
                ent.clone(),
                c.from_bus,
                c.to_bus,
                c.reactance,
                &c.rating,
                h,
                &bus_exists,
            );
            if c.capital_cost < 0.0 {
                out.push(Violation {
                    entity: ent.clone(),
                    rule: "capital_cost must be >= 0".into(),
                });
            }
            if !(0.0..1.0).contains(&c.maintenance_ratio) {
                out.push(Violation {
                    entity: ent,
                    rule: "maintenance_ratio out of [0, 1)".into(),
                });
            }
        }

        for r in &self.hydrogen_routes {
            let ent = format!("hydrogen route {}", r.id);
            if !bus_exists(r.from_bus) {
                flag(&mut out, ent.clone(), format!("unknown bus id {}", r.from_bus));
            }
            if !bus_exists(r.to_bus) {
                flag(&mut out, ent.clone(), format!("unknown bus id {}", r.to_bus));
            }
            if r.from_bus == r.to_bus {
                flag(&mut out, ent.clone(), "from_bus == to_bus");
            }
            if !(r.eta_e > 0.0 && r.eta_e <= 1.0) {
                flag(&mut out, ent.clone(), "eta_e out of (0,1]");
            }
            if !(r.eta_f > 0.0 && r.eta_f <= 1.0) {
                flag(&mut out, ent.clone(), "eta_f out of (0,1]");
            }
            if r.eta_c < 0.0 {
                flag(&mut out, ent.clone(), "eta_c must be >= 0");
            }
            if r.pipeline_capacity < 0.0 || r.electrolyzer_rating < 0.0 || r.fuelcell_rating < 0.0
            {
                flag(&mut out, ent.clone(), "ratings and capacities must be >= 0");
            }
            if r.pipeline_cost < 0.0 || r.electrolyzer_cost < 0.0 || r.fuelcell_cost < 0.0 {
                flag(&mut out, ent.clone(), "costs must be >= 0");
            }
            if !(0.0..1.0).contains(&r.maintenance_ratio) {
                flag(&mut out, ent, "maintenance_ratio out of [0, 1)");
            }
        }

        if self.load.by_bus.len() != self.buses.len() {
            flag(
                &mut out,
                "load",
                format!(
                    "load profiles for {} buses but case has {}",
                    self.load.by_bus.len(),
                    self.buses.len()
                ),
            );
        }
        for (i, prof) in self.load.by_bus.iter().enumerate() {
            let ent = format!("load[bus #{i}]");
            if !prof.matches(h) {
                flag(&mut out, ent, "demand tensor shape != horizon");
            } else if prof.min() < 0.0 {
                flag(&mut out, ent, "demand must be >= 0");
            }
        }

        // The shedding penalty has to dominate every annualized generation
        // cost coefficient or the optimizer may shed load for economics.
        let max_gen_coeff = self
            .generators
            .iter()
            .map(|g| self.horizon.hour_weight() * self.mva_base * g.energy_cost)
            .fold(0.0, f64::max);
        if self.shed_penalty <= max_gen_coeff {
            flag(
                &mut out,
                "case",
                format!(
                    "shed_penalty {} must exceed the largest annualized generation cost {}",
                    self.shed_penalty, max_gen_coeff
                ),
            );
        }

        out
    }

    /// Rescale every renewable availability tensor by one factor so that
    /// available renewable energy equals `target` times load energy over the
    /// horizon (both with the typical-day weighting).
    pub fn scale_renewable_penetration(&self, target: f64) -> Result<NetworkCase, TransformError> {
        let mut out = self.clone();
        if target == 0.0 {
            for r in &mut out.renewables {
                r.availability = r.availability.scaled(0.0);
            }
            return Ok(out);
        }
        let available = self.renewable_energy();
        if available <= 0.0 {
            return Err(TransformError::NoRenewableEnergy);
        }
        let factor = target * self.load_energy() / available;
        for r in &mut out.renewables {
            r.availability = r.availability.scaled(factor);
        }
        Ok(out)
    }

    /// Multiply all three hydrogen capital costs by (1 - reduction).
    /// Precondition: 0 <= reduction < 1.
    pub fn with_hydrogen_cost_reduction(&self, reduction: f64) -> NetworkCase {
        let keep = 1.0 - reduction;
        let mut out = self.clone();
        for r in &mut out.hydrogen_routes {
            r.pipeline_cost *= keep;
            r.electrolyzer_cost *= keep;
            r.fuelcell_cost *= keep;
        }
        out
    }

    /// Achieved renewable penetration: available renewable energy over load
    /// energy.
    pub fn penetration(&self) -> f64 {
        self.renewable_energy() / self.load_energy()
    }
}

fn flag(out: &mut Vec<Violation>, entity: impl Into<String>, rule: impl Into<String>) {
    out.push(Violation {
        entity: entity.into(),
        rule: rule.into(),
    });
}

fn flag_duplicate_ids<T>(
    out: &mut Vec<Violation>,
    items: &[T],
    id: impl Fn(&T) -> usize,
    kind: &str,
) {
    for (i, item) in items.iter().enumerate() {
        if items[..i].iter().any(|o| id(o) == id(item)) {
            flag(
                out,
                format!("{kind} {}", id(item)),
                format!("duplicate {kind} id"),
            );
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_line(
    out: &mut Vec<Violation>,
    entity: String,
    from: usize,
    to: usize,
    reactance: f64,
    rating: &HourlyProfile,
    horizon: &PlanningHorizon,
    bus_exists: &impl Fn(usize) -> bool,
) {
    let mut flag = |rule: String| {
        out.push(Violation {
            entity: entity.clone(),
            rule,
        })
    };
    if !bus_exists(from) {
        flag(format!("unknown bus id {from}"));
    }
    if !bus_exists(to) {
        flag(format!("unknown bus id {to}"));
    }
    if from == to {
        flag("from_bus == to_bus".into());
    }
    if reactance <= 0.0 || reactance.is_nan() {
        flag("reactance must be > 0".into());
    }
    if !rating.matches(horizon) {
        flag("rating tensor shape != horizon".into());
    } else if rating.min() <= 0.0 {
        flag("rating must be > 0 elementwise".into());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_bus_case;
    use proptest::prelude::*;

    #[test]
    fn valid_case_has_no_violations() {
        assert_eq!(two_bus_case().validate(), vec![]);
    }

    #[test]
    fn eta_out_of_range_is_flagged() {
        let mut case = two_bus_case();
        case.hydrogen_routes[0].eta_e = 1.2;
        let v = case.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].rule.contains("eta_e out of (0,1]"), "{}", v[0]);
    }

    #[test]
    fn two_slack_buses_are_flagged() {
        let mut case = two_bus_case();
        case.buses[1].is_slack = true;
        let v = case.validate();
        assert!(v.iter().any(|v| v.rule.contains("exactly one slack bus")));
    }

    #[test]
    fn unknown_bus_reference_is_flagged() {
        let mut case = two_bus_case();
        case.generators[0].bus = 99;
        let v = case.validate();
        assert!(v.iter().any(|v| v.rule.contains("unknown bus id 99")));
    }

    #[test]
    fn retired_generator_has_zero_bounds() {
        let mut g = two_bus_case().generators[0].clone();
        g.retire_period = Some(0);
        assert_eq!(g.bounds_in_period(0), (0.0, 0.0));
    }

    #[test]
    fn penetration_scaling_direct_ratio() {
        // Available renewable energy equals load energy, so the factor is
        // the target itself.
        let mut case = two_bus_case();
        case.renewables[0].availability = HourlyProfile::filled(1, 1, 1, 14.5);
        assert!((case.penetration() - 1.0).abs() < 1e-12);
        let scaled = case.scale_renewable_penetration(0.6).unwrap();
        assert!((scaled.renewables[0].availability.get(0, 0, 0) - 0.6 * 14.5).abs() < 1e-12);
    }

    #[test]
    fn penetration_target_zero_zeroes_availability() {
        let case = two_bus_case();
        let scaled = case.scale_renewable_penetration(0.0).unwrap();
        assert_eq!(scaled.renewables[0].availability.get(0, 0, 0), 0.0);
    }

    #[test]
    fn penetration_unachievable_with_zero_availability() {
        let mut case = two_bus_case();
        case.renewables[0].availability = HourlyProfile::filled(1, 1, 1, 0.0);
        assert_eq!(
            case.scale_renewable_penetration(0.5),
            Err(TransformError::NoRenewableEnergy)
        );
    }

    #[test]
    fn penetration_recomputes_to_target() {
        // Independent recomputation of the energy ratio after scaling.
        let case = two_bus_case();
        let scaled = case.scale_renewable_penetration(0.8).unwrap();
        let avail: f64 = scaled
            .renewables
            .iter()
            .map(|r| r.availability.sum() * scaled.horizon.day_weight())
            .sum();
        let load: f64 = scaled
            .load
            .by_bus
            .iter()
            .map(|b| b.sum() * scaled.horizon.day_weight())
            .sum();
        assert!((avail / load - 0.80).abs() < 1e-9);
    }

    #[test]
    fn cost_reduction_arithmetic() {
        let case = two_bus_case();
        let reduced = case.with_hydrogen_cost_reduction(0.2);
        let r = &reduced.hydrogen_routes[0];
        assert!((r.pipeline_cost - 1600.0).abs() < 1e-9);
        assert!((r.electrolyzer_cost - 24.0).abs() < 1e-9);
        assert!((r.fuelcell_cost - 28.0).abs() < 1e-9);
    }

    #[test]
    fn cost_reduction_zero_is_identity() {
        let case = two_bus_case();
        assert_eq!(case.with_hydrogen_cost_reduction(0.0), case);
    }

    proptest! {
        /// Scaling to target a and then b equals scaling to b directly:
        /// both are uniform rescalings of the original tensor.
        #[test]
        fn penetration_scaling_is_ratio_idempotent(
            a in 0.05f64..3.0,
            b in 0.05f64..3.0,
            avail in 0.5f64..20.0,
        ) {
            let mut case = two_bus_case();
            case.renewables[0].availability = HourlyProfile::filled(1, 1, 1, avail);
            let via_a = case
                .scale_renewable_penetration(a).unwrap()
                .scale_renewable_penetration(b).unwrap();
            let direct = case.scale_renewable_penetration(b).unwrap();
            let x = via_a.renewables[0].availability.get(0, 0, 0);
            let y = direct.renewables[0].availability.get(0, 0, 0);
            prop_assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0));
        }
    }
}
