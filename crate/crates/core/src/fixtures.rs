//! Shared example cases, kept small enough for exhaustive enumeration.

use alloc::vec;

use crate::grid::{
    Bus, CandidateLine, HourlyProfile, HydrogenRoute, LoadProfile, NetworkCase, PlanningHorizon,
    RenewablePlant, ThermalGenerator, TransmissionLine, UnitKind,
};

fn tiny_horizon() -> PlanningHorizon {
    PlanningHorizon {
        n_periods: 1,
        years_per_period: 5,
        typical_days_per_year: 1,
        intervals_per_day: 1,
        period_labels: vec!["2021-2025".into()],
    }
}

/// Two-bus case mirroring the bundled point-to-point example: cheap thermal
/// and renewable generation behind a congested line, a hydrogen route as the
/// only expansion option, one modeled hour.
pub fn two_bus_case() -> NetworkCase {
    let h = tiny_horizon();
    NetworkCase {
        mva_base: 100.0,
        horizon: h.clone(),
        buses: vec![
            Bus {
                id: 1,
                name: "gen-area".into(),
                is_slack: true,
            },
            Bus {
                id: 2,
                name: "load-area".into(),
                is_slack: false,
            },
        ],
        generators: vec![ThermalGenerator {
            id: 1,
            bus: 1,
            kind: UnitKind::Existing,
            p_min: 0.0,
            p_max: 9.5,
            per_period_limits: vec![],
            energy_cost: 3.0e-5,
            retire_period: None,
        }],
        renewables: vec![RenewablePlant {
            id: 1,
            bus: 1,
            kind: UnitKind::Existing,
            p_min: 0.0,
            availability: HourlyProfile::filled(1, 1, 1, 10.0),
        }],
        lines: vec![TransmissionLine {
            id: 1,
            from_bus: 1,
            to_bus: 2,
            reactance: 0.1,
            rating: HourlyProfile::filled(1, 1, 1, 9.5),
        }],
        candidate_lines: vec![],
        hydrogen_routes: vec![HydrogenRoute {
            id: 1,
            from_bus: 1,
            to_bus: 2,
            pipeline_capacity: 1000.0,
            electrolyzer_rating: 10.0,
            fuelcell_rating: 5.0,
            eta_e: 0.8,
            eta_f: 0.625,
            eta_c: 0.0,
            pipeline_cost: 2000.0,
            electrolyzer_cost: 30.0,
            fuelcell_cost: 35.0,
            maintenance_ratio: 0.01,
        }],
        load: LoadProfile {
            by_bus: vec![
                HourlyProfile::filled(1, 1, 1, 0.0),
                HourlyProfile::filled(1, 1, 1, 14.5),
            ],
        },
        shed_penalty: 1.0e6,
        angle_bound: core::f64::consts::PI,
    }
}

/// Three-bus case exercising every entity family: existing and new thermal
/// units, existing and new renewables, one existing line, one candidate line
/// and one hydrogen route, over 2 periods x 1 day x 2 hours.
pub fn three_bus_case() -> NetworkCase {
    let horizon = PlanningHorizon {
        n_periods: 2,
        years_per_period: 5,
        typical_days_per_year: 1,
        intervals_per_day: 2,
        period_labels: vec!["2026-2030".into(), "2031-2035".into()],
    };
    NetworkCase {
        mva_base: 100.0,
        horizon: horizon.clone(),
        buses: vec![
            Bus {
                id: 1,
                name: "north".into(),
                is_slack: true,
            },
            Bus {
                id: 2,
                name: "mid".into(),
                is_slack: false,
            },
            Bus {
                id: 3,
                name: "south".into(),
                is_slack: false,
            },
        ],
        generators: vec![
            ThermalGenerator {
                id: 1,
                bus: 1,
                kind: UnitKind::Existing,
                p_min: 0.0,
                p_max: 8.0,
                per_period_limits: vec![],
                energy_cost: 3.0e-5,
                retire_period: None,
            },
            ThermalGenerator {
                id: 2,
                bus: 3,
                kind: UnitKind::New,
                p_min: 0.0,
                p_max: 0.0,
                per_period_limits: vec![(0.0, 2.0), (0.0, 4.0)],
                energy_cost: 8.0e-5,
                retire_period: None,
            },
        ],
        renewables: vec![
            RenewablePlant {
                id: 1,
                bus: 1,
                kind: UnitKind::Existing,
                p_min: 0.0,
                availability: HourlyProfile::filled(2, 1, 2, 6.0),
            },
            RenewablePlant {
                id: 2,
                bus: 2,
                kind: UnitKind::New,
                p_min: 0.0,
                availability: HourlyProfile::from_fn(&horizon, |p, _, t| {
                    2.0 + 2.0 * p as f64 + t as f64
                }),
            },
        ],
        lines: vec![TransmissionLine {
            id: 1,
            from_bus: 1,
            to_bus: 2,
            reactance: 0.1,
            rating: HourlyProfile::filled(2, 1, 2, 5.0),
        }],
        candidate_lines: vec![CandidateLine {
            id: 1,
            from_bus: 2,
            to_bus: 3,
            reactance: 0.08,
            rating: HourlyProfile::filled(2, 1, 2, 4.0),
            capital_cost: 15.0,
            maintenance_ratio: 0.02,
        }],
        hydrogen_routes: vec![HydrogenRoute {
            id: 1,
            from_bus: 1,
            to_bus: 3,
            pipeline_capacity: 500.0,
            electrolyzer_rating: 6.0,
            fuelcell_rating: 3.0,
            eta_e: 0.8,
            eta_f: 0.75,
            eta_c: 0.02,
            pipeline_cost: 120.0,
            electrolyzer_cost: 20.0,
            fuelcell_cost: 25.0,
            maintenance_ratio: 0.01,
        }],
        load: LoadProfile {
            by_bus: vec![
                HourlyProfile::filled(2, 1, 2, 0.0),
                HourlyProfile::filled(2, 1, 2, 1.0),
                HourlyProfile::from_fn(&horizon, |p, _, t| 4.0 + p as f64 + 2.0 * t as f64),
            ],
        },
        shed_penalty: 1.0e6,
        angle_bound: core::f64::consts::PI,
    }
}
