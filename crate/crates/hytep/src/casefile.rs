//! JSON case files.
//!
//! The on-disk format keeps every electrical quantity in MW (fields carry a
//! `_mw` suffix); [`load_case`] converts to per-unit on the case's MVA base
//! and [`save_case`] converts back. Hydrogen pipeline capacities stay in MWh
//! of hydrogen per hour and costs stay in million currency units, matching
//! the in-memory convention. Profile tensors are nested arrays ordered
//! `[period][day][hour]`; the load section maps bus ids to tensors and
//! omitted buses carry zero demand.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use hytep_core::grid::{
    Bus, CandidateLine, HourlyProfile, HydrogenRoute, LoadProfile, NetworkCase, PlanningHorizon,
    RenewablePlant, ThermalGenerator, TransmissionLine, UnitKind, Violation,
};

#[derive(Debug)]
pub enum CaseError {
    Io(std::io::Error),
    Parse(serde_json::Error),
    /// A profile tensor does not match the horizon shape.
    Shape { entity: String, detail: String },
    /// The load section names a bus that is not in the bus list.
    UnknownLoadBus { bus: String },
    /// The case parsed but fails validation.
    Invalid(Vec<Violation>),
}

impl fmt::Display for CaseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseError::Io(e) => write!(f, "cannot read case file: {e}"),
            CaseError::Parse(e) => write!(f, "malformed case file: {e}"),
            CaseError::Shape { entity, detail } => write!(f, "{entity}: {detail}"),
            CaseError::UnknownLoadBus { bus } => {
                write!(f, "load section references unknown bus {bus}")
            }
            CaseError::Invalid(violations) => {
                write!(f, "case fails validation ({} rules):", violations.len())?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for CaseError {}

impl From<std::io::Error> for CaseError {
    fn from(e: std::io::Error) -> Self {
        CaseError::Io(e)
    }
}

impl From<serde_json::Error> for CaseError {
    fn from(e: serde_json::Error) -> Self {
        CaseError::Parse(e)
    }
}

type Tensor = Vec<Vec<Vec<f64>>>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    mva_base: f64,
    horizon: HorizonDto,
    buses: Vec<BusDto>,
    #[serde(default)]
    generators: Vec<GeneratorDto>,
    #[serde(default)]
    renewables: Vec<RenewableDto>,
    #[serde(default)]
    lines: Vec<LineDto>,
    #[serde(default)]
    candidate_lines: Vec<CandidateLineDto>,
    #[serde(default)]
    hydrogen_routes: Vec<HydrogenRouteDto>,
    /// Bus id -> demand tensor in MW. Buses without an entry have no load.
    #[serde(default)]
    load_mw: BTreeMap<String, Tensor>,
    shed_penalty: f64,
    angle_bound: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HorizonDto {
    n_periods: usize,
    years_per_period: u32,
    typical_days_per_year: usize,
    intervals_per_day: usize,
    period_labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BusDto {
    id: usize,
    name: String,
    #[serde(default)]
    is_slack: bool,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum KindDto {
    Existing,
    New,
}

impl From<KindDto> for UnitKind {
    fn from(k: KindDto) -> Self {
        match k {
            KindDto::Existing => UnitKind::Existing,
            KindDto::New => UnitKind::New,
        }
    }
}

impl From<UnitKind> for KindDto {
    fn from(k: UnitKind) -> Self {
        match k {
            UnitKind::Existing => KindDto::Existing,
            UnitKind::New => KindDto::New,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDto {
    id: usize,
    bus: usize,
    kind: KindDto,
    #[serde(default)]
    p_min_mw: f64,
    #[serde(default)]
    p_max_mw: f64,
    /// One (min, max) MW pair per period; used by new units.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    per_period_limits_mw: Vec<[f64; 2]>,
    /// Million currency units per MWh.
    energy_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    retire_period: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RenewableDto {
    id: usize,
    bus: usize,
    kind: KindDto,
    #[serde(default)]
    p_min_mw: f64,
    availability_mw: Tensor,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineDto {
    id: usize,
    from_bus: usize,
    to_bus: usize,
    reactance: f64,
    rating_mw: Tensor,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CandidateLineDto {
    id: usize,
    from_bus: usize,
    to_bus: usize,
    reactance: f64,
    rating_mw: Tensor,
    capital_cost: f64,
    maintenance_ratio: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HydrogenRouteDto {
    id: usize,
    from_bus: usize,
    to_bus: usize,
    /// MWh of hydrogen per hour.
    pipeline_capacity: f64,
    electrolyzer_rating_mw: f64,
    fuelcell_rating_mw: f64,
    eta_e: f64,
    eta_f: f64,
    eta_c: f64,
    pipeline_cost: f64,
    electrolyzer_cost: f64,
    fuelcell_cost: f64,
    maintenance_ratio: f64,
}

fn tensor_to_profile(
    entity: &str,
    tensor: &Tensor,
    horizon: &PlanningHorizon,
    scale: f64,
) -> Result<HourlyProfile, CaseError> {
    let shape_err = |detail: String| CaseError::Shape {
        entity: entity.to_string(),
        detail,
    };
    if tensor.len() != horizon.n_periods {
        return Err(shape_err(format!(
            "tensor has {} periods, horizon has {}",
            tensor.len(),
            horizon.n_periods
        )));
    }
    let mut profile = HourlyProfile::zeros(horizon);
    for (p, days) in tensor.iter().enumerate() {
        if days.len() != horizon.typical_days_per_year {
            return Err(shape_err(format!(
                "period {p} has {} days, horizon has {}",
                days.len(),
                horizon.typical_days_per_year
            )));
        }
        for (d, hours) in days.iter().enumerate() {
            if hours.len() != horizon.intervals_per_day {
                return Err(shape_err(format!(
                    "period {p} day {d} has {} hours, horizon has {}",
                    hours.len(),
                    horizon.intervals_per_day
                )));
            }
            for (t, &v) in hours.iter().enumerate() {
                profile.set(p, d, t, v * scale);
            }
        }
    }
    Ok(profile)
}

fn profile_to_tensor(profile: &HourlyProfile, scale: f64) -> Tensor {
    let (periods, days, hours) = profile.dims();
    (0..periods)
        .map(|p| {
            (0..days)
                .map(|d| (0..hours).map(|t| profile.get(p, d, t) * scale).collect())
                .collect()
        })
        .collect()
}

/// Parse case-file text into a per-unit [`NetworkCase`]. Shape and load
/// references are checked here; semantic rules are left to
/// [`NetworkCase::validate`].
pub fn parse_case(text: &str) -> Result<NetworkCase, CaseError> {
    let file: CaseFile = serde_json::from_str(text)?;
    let horizon = PlanningHorizon {
        n_periods: file.horizon.n_periods,
        years_per_period: file.horizon.years_per_period,
        typical_days_per_year: file.horizon.typical_days_per_year,
        intervals_per_day: file.horizon.intervals_per_day,
        period_labels: file.horizon.period_labels,
    };
    let to_pu = 1.0 / file.mva_base;

    let buses: Vec<Bus> = file
        .buses
        .iter()
        .map(|b| Bus {
            id: b.id,
            name: b.name.clone(),
            is_slack: b.is_slack,
        })
        .collect();

    let generators = file
        .generators
        .iter()
        .map(|g| ThermalGenerator {
            id: g.id,
            bus: g.bus,
            kind: g.kind.into(),
            p_min: g.p_min_mw * to_pu,
            p_max: g.p_max_mw * to_pu,
            per_period_limits: g
                .per_period_limits_mw
                .iter()
                .map(|&[lo, hi]| (lo * to_pu, hi * to_pu))
                .collect(),
            energy_cost: g.energy_cost,
            retire_period: g.retire_period,
        })
        .collect();

    let renewables = file
        .renewables
        .iter()
        .map(|r| {
            Ok(RenewablePlant {
                id: r.id,
                bus: r.bus,
                kind: r.kind.into(),
                p_min: r.p_min_mw * to_pu,
                availability: tensor_to_profile(
                    &format!("renewable {}", r.id),
                    &r.availability_mw,
                    &horizon,
                    to_pu,
                )?,
            })
        })
        .collect::<Result<Vec<_>, CaseError>>()?;

    let lines = file
        .lines
        .iter()
        .map(|l| {
            Ok(TransmissionLine {
                id: l.id,
                from_bus: l.from_bus,
                to_bus: l.to_bus,
                reactance: l.reactance,
                rating: tensor_to_profile(
                    &format!("line {}", l.id),
                    &l.rating_mw,
                    &horizon,
                    to_pu,
                )?,
            })
        })
        .collect::<Result<Vec<_>, CaseError>>()?;

    let candidate_lines = file
        .candidate_lines
        .iter()
        .map(|l| {
            Ok(CandidateLine {
                id: l.id,
                from_bus: l.from_bus,
                to_bus: l.to_bus,
                reactance: l.reactance,
                rating: tensor_to_profile(
                    &format!("candidate line {}", l.id),
                    &l.rating_mw,
                    &horizon,
                    to_pu,
                )?,
                capital_cost: l.capital_cost,
                maintenance_ratio: l.maintenance_ratio,
            })
        })
        .collect::<Result<Vec<_>, CaseError>>()?;

    let hydrogen_routes = file
        .hydrogen_routes
        .iter()
        .map(|r| HydrogenRoute {
            id: r.id,
            from_bus: r.from_bus,
            to_bus: r.to_bus,
            pipeline_capacity: r.pipeline_capacity,
            electrolyzer_rating: r.electrolyzer_rating_mw * to_pu,
            fuelcell_rating: r.fuelcell_rating_mw * to_pu,
            eta_e: r.eta_e,
            eta_f: r.eta_f,
            eta_c: r.eta_c,
            pipeline_cost: r.pipeline_cost,
            electrolyzer_cost: r.electrolyzer_cost,
            fuelcell_cost: r.fuelcell_cost,
            maintenance_ratio: r.maintenance_ratio,
        })
        .collect();

    let mut by_bus: Vec<HourlyProfile> = buses.iter().map(|_| HourlyProfile::zeros(&horizon)).collect();
    for (key, tensor) in &file.load_mw {
        let id: usize = key
            .parse()
            .map_err(|_| CaseError::UnknownLoadBus { bus: key.clone() })?;
        let pos = buses
            .iter()
            .position(|b| b.id == id)
            .ok_or(CaseError::UnknownLoadBus { bus: key.clone() })?;
        by_bus[pos] = tensor_to_profile(&format!("load at bus {id}"), tensor, &horizon, to_pu)?;
    }

    Ok(NetworkCase {
        mva_base: file.mva_base,
        horizon,
        buses,
        generators,
        renewables,
        lines,
        candidate_lines,
        hydrogen_routes,
        load: LoadProfile { by_bus },
        shed_penalty: file.shed_penalty,
        angle_bound: file.angle_bound,
    })
}

/// Read, parse and validate a case file.
pub fn load_case(path: &Path) -> Result<NetworkCase, CaseError> {
    let text = fs::read_to_string(path)?;
    let case = parse_case(&text)?;
    let violations = case.validate();
    if !violations.is_empty() {
        return Err(CaseError::Invalid(violations));
    }
    Ok(case)
}

/// Serialize a case back to file text (MW units, pretty-printed JSON).
/// All-zero load buses are omitted from the load section.
pub fn case_to_text(case: &NetworkCase) -> String {
    let from_pu = case.mva_base;
    let file = CaseFile {
        mva_base: case.mva_base,
        horizon: HorizonDto {
            n_periods: case.horizon.n_periods,
            years_per_period: case.horizon.years_per_period,
            typical_days_per_year: case.horizon.typical_days_per_year,
            intervals_per_day: case.horizon.intervals_per_day,
            period_labels: case.horizon.period_labels.clone(),
        },
        buses: case
            .buses
            .iter()
            .map(|b| BusDto {
                id: b.id,
                name: b.name.clone(),
                is_slack: b.is_slack,
            })
            .collect(),
        generators: case
            .generators
            .iter()
            .map(|g| GeneratorDto {
                id: g.id,
                bus: g.bus,
                kind: g.kind.into(),
                p_min_mw: g.p_min * from_pu,
                p_max_mw: g.p_max * from_pu,
                per_period_limits_mw: g
                    .per_period_limits
                    .iter()
                    .map(|&(lo, hi)| [lo * from_pu, hi * from_pu])
                    .collect(),
                energy_cost: g.energy_cost,
                retire_period: g.retire_period,
            })
            .collect(),
        renewables: case
            .renewables
            .iter()
            .map(|r| RenewableDto {
                id: r.id,
                bus: r.bus,
                kind: r.kind.into(),
                p_min_mw: r.p_min * from_pu,
                availability_mw: profile_to_tensor(&r.availability, from_pu),
            })
            .collect(),
        lines: case
            .lines
            .iter()
            .map(|l| LineDto {
                id: l.id,
                from_bus: l.from_bus,
                to_bus: l.to_bus,
                reactance: l.reactance,
                rating_mw: profile_to_tensor(&l.rating, from_pu),
            })
            .collect(),
        candidate_lines: case
            .candidate_lines
            .iter()
            .map(|l| CandidateLineDto {
                id: l.id,
                from_bus: l.from_bus,
                to_bus: l.to_bus,
                reactance: l.reactance,
                rating_mw: profile_to_tensor(&l.rating, from_pu),
                capital_cost: l.capital_cost,
                maintenance_ratio: l.maintenance_ratio,
            })
            .collect(),
        hydrogen_routes: case
            .hydrogen_routes
            .iter()
            .map(|r| HydrogenRouteDto {
                id: r.id,
                from_bus: r.from_bus,
                to_bus: r.to_bus,
                pipeline_capacity: r.pipeline_capacity,
                electrolyzer_rating_mw: r.electrolyzer_rating * from_pu,
                fuelcell_rating_mw: r.fuelcell_rating * from_pu,
                eta_e: r.eta_e,
                eta_f: r.eta_f,
                eta_c: r.eta_c,
                pipeline_cost: r.pipeline_cost,
                electrolyzer_cost: r.electrolyzer_cost,
                fuelcell_cost: r.fuelcell_cost,
                maintenance_ratio: r.maintenance_ratio,
            })
            .collect(),
        load_mw: case
            .buses
            .iter()
            .zip(&case.load.by_bus)
            .filter(|(_, prof)| prof.values().iter().any(|&v| v != 0.0))
            .map(|(b, prof)| (b.id.to_string(), profile_to_tensor(prof, from_pu)))
            .collect(),
        shed_penalty: case.shed_penalty,
        angle_bound: case.angle_bound,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("case serialization cannot fail");
    text.push('\n');
    text
}

/// Write a case to disk in file units.
pub fn save_case(case: &NetworkCase, path: &Path) -> Result<(), CaseError> {
    fs::write(path, case_to_text(case))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text_fixture() -> String {
        r#"{
            "mva_base": 100.0,
            "horizon": {
                "n_periods": 1,
                "years_per_period": 5,
                "typical_days_per_year": 1,
                "intervals_per_day": 2,
                "period_labels": ["2026-2030"]
            },
            "buses": [
                {"id": 1, "name": "a", "is_slack": true},
                {"id": 2, "name": "b"}
            ],
            "generators": [
                {"id": 1, "bus": 1, "kind": "existing", "p_max_mw": 400.0, "energy_cost": 3e-5}
            ],
            "renewables": [
                {"id": 1, "bus": 1, "kind": "existing", "availability_mw": [[[300.0, 200.0]]]}
            ],
            "lines": [
                {"id": 1, "from_bus": 1, "to_bus": 2, "reactance": 0.1,
                 "rating_mw": [[[200.0, 200.0]]]}
            ],
            "load_mw": {"2": [[[150.0, 180.0]]]},
            "shed_penalty": 1e6,
            "angle_bound": 3.141592653589793
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_converts_to_per_unit() {
        let case = parse_case(&text_fixture()).unwrap();
        assert_eq!(case.buses.len(), 2);
        assert_eq!(case.generators[0].p_max, 4.0);
        assert_eq!(case.renewables[0].availability.get(0, 0, 1), 2.0);
        assert_eq!(case.lines[0].rating.get(0, 0, 0), 2.0);
        // Bus 1 has no load entry and defaults to zero.
        assert_eq!(case.load.by_bus[0].sum(), 0.0);
        assert_eq!(case.load.by_bus[1].get(0, 0, 1), 1.8);
        // Unconverted fields pass through.
        assert_eq!(case.shed_penalty, 1e6);
        assert_eq!(case.generators[0].energy_cost, 3e-5);
        assert_eq!(case.validate(), vec![]);
    }

    #[test]
    fn round_trips_through_text() {
        let case = parse_case(&text_fixture()).unwrap();
        let again = parse_case(&case_to_text(&case)).unwrap();
        assert_eq!(case, again);
    }

    #[test]
    fn rejects_bad_tensor_shape() {
        let text = text_fixture().replace("[[[150.0, 180.0]]]", "[[[150.0]]]");
        let err = parse_case(&text).unwrap_err();
        match err {
            CaseError::Shape { entity, detail } => {
                assert_eq!(entity, "load at bus 2");
                assert!(detail.contains("1 hours"), "{detail}");
            }
            other => panic!("expected shape error, got {other}"),
        }
    }

    #[test]
    fn rejects_unknown_load_bus() {
        let text = text_fixture().replace("\"load_mw\": {\"2\":", "\"load_mw\": {\"99\":");
        match parse_case(&text).unwrap_err() {
            CaseError::UnknownLoadBus { bus } => assert_eq!(bus, "99"),
            other => panic!("expected unknown bus, got {other}"),
        }
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = text_fixture().replace("\"mva_base\"", "\"mva_basis\"");
        assert!(matches!(parse_case(&text), Err(CaseError::Parse(_))));
    }

    #[test]
    fn load_case_validates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("case.json");
        // Two slack buses: parses fine, fails validation.
        let text = text_fixture().replace("{\"id\": 2, \"name\": \"b\"}",
            "{\"id\": 2, \"name\": \"b\", \"is_slack\": true}");
        std::fs::write(&path, text).unwrap();
        match load_case(&path).unwrap_err() {
            CaseError::Invalid(violations) => {
                assert!(violations.iter().any(|v| v.rule.contains("slack")));
            }
            other => panic!("expected validation failure, got {other}"),
        }
    }

    #[test]
    fn empty_candidate_sections_are_valid() {
        let case = parse_case(&text_fixture()).unwrap();
        assert!(case.candidate_lines.is_empty());
        assert!(case.hydrogen_routes.is_empty());
        assert_eq!(case.validate(), vec![]);
    }
}
