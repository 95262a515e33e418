//! Report files: sweep tables as CSV plus a combined JSON document, and
//! hourly operation series for plotting.
//!
//! Columns are written in a fixed, documented order. Power columns carry a
//! `_mw` suffix and are converted from per-unit; hydrogen flow stays in MWh
//! of hydrogen per hour. A failed sweep row keeps its axis values and shows
//! `failed` in the status column; its cost cells are NaN in CSV and null in
//! JSON.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use hytep_core::grid::NetworkCase;
use hytep_core::operation::OperationResult;
use hytep_core::scenario::{RowStatus, ScenarioRow};

#[derive(Debug)]
pub enum ReportError {
    Io(std::io::Error),
    Csv(csv::Error),
    /// `emit_tables` needs at least one row.
    NoRows,
    /// A requested route id is not part of the case.
    UnknownRoute { route: usize },
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::Io(e) => write!(f, "cannot write report: {e}"),
            ReportError::Csv(e) => write!(f, "cannot write csv: {e}"),
            ReportError::NoRows => write!(f, "no rows to report"),
            ReportError::UnknownRoute { route } => write!(f, "unknown hydrogen route {route}"),
        }
    }
}

impl std::error::Error for ReportError {}

impl From<std::io::Error> for ReportError {
    fn from(e: std::io::Error) -> Self {
        ReportError::Io(e)
    }
}

impl From<csv::Error> for ReportError {
    fn from(e: csv::Error) -> Self {
        ReportError::Csv(e)
    }
}

/// Axis columns present in a row, in sweep order.
fn family_axes(row: &ScenarioRow) -> Vec<&'static str> {
    let mut axes = Vec::new();
    if row.penetration.is_some() {
        axes.push("penetration");
    }
    if row.round_trip.is_some() {
        axes.push("round_trip");
    }
    if row.cost_reduction.is_some() {
        axes.push("cost_reduction");
    }
    axes
}

fn family_name(row: &ScenarioRow) -> String {
    let axes = family_axes(row);
    if axes.is_empty() {
        "base".to_string()
    } else {
        axes.join("_")
    }
}

fn axis_cell(v: Option<f64>) -> Option<String> {
    v.map(|x| x.to_string())
}

/// Finite floats become JSON numbers, NaN/infinities become null.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn row_json(row: &ScenarioRow) -> Value {
    let mut obj = json!({
        "penetration": row.penetration,
        "round_trip": row.round_trip,
        "cost_reduction": row.cost_reduction,
        "status": row.status.as_str(),
        "pipelines_built": row.pipelines_built,
        "lines_built": row.lines_built,
        "construction_periods": row.construction_periods,
        "hydrogen_investment": num(row.hydrogen_investment),
        "line_investment": num(row.line_investment),
        "generation_cost": num(row.generation_cost),
        "shed_penalty_value": num(row.shed_penalty_value),
        "total": num(row.total),
        "gap": num(row.gap),
    });
    if let RowStatus::Failed(message) = &row.status {
        obj["error"] = json!(message);
    }
    obj
}

/// Write sweep rows under `dir`: one `{model}_{family}.csv` per axis family
/// (family = names of the swept axes; `base` when none) plus a combined
/// `{model}_sweep.json`. Rows keep their input order. Returns the paths
/// written, JSON last.
pub fn emit_tables(
    rows: &[ScenarioRow],
    model_name: &str,
    dir: &Path,
) -> Result<Vec<PathBuf>, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::NoRows);
    }
    fs::create_dir_all(dir)?;

    let mut families: Vec<(String, Vec<&ScenarioRow>)> = Vec::new();
    for row in rows {
        let name = family_name(row);
        match families.iter_mut().find(|(n, _)| *n == name) {
            Some((_, group)) => group.push(row),
            None => families.push((name, vec![row])),
        }
    }

    let mut written = Vec::new();
    for (name, group) in &families {
        let path = dir.join(format!("{model_name}_{name}.csv"));
        let mut writer = csv::Writer::from_path(&path)?;
        let axes = family_axes(group[0]);
        let mut header: Vec<&str> = axes.clone();
        header.extend([
            "status",
            "pipelines_built",
            "lines_built",
            "construction_periods",
            "hydrogen_investment",
            "line_investment",
            "generation_cost",
            "shed_penalty_value",
            "total",
            "gap",
        ]);
        writer.write_record(&header)?;
        for row in group {
            let mut record: Vec<String> = Vec::new();
            record.extend(axis_cell(row.penetration));
            record.extend(axis_cell(row.round_trip));
            record.extend(axis_cell(row.cost_reduction));
            record.push(row.status.as_str().to_string());
            record.push(row.pipelines_built.to_string());
            record.push(row.lines_built.to_string());
            record.push(row.construction_periods.join("|"));
            record.push(row.hydrogen_investment.to_string());
            record.push(row.line_investment.to_string());
            record.push(row.generation_cost.to_string());
            record.push(row.shed_penalty_value.to_string());
            record.push(row.total.to_string());
            record.push(row.gap.to_string());
            writer.write_record(&record)?;
        }
        writer.flush()?;
        written.push(path);
    }

    let json_path = dir.join(format!("{model_name}_sweep.json"));
    let doc = json!({
        "model": model_name,
        "rows": rows.iter().map(row_json).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialization cannot fail");
    text.push('\n');
    fs::write(&json_path, text)?;
    written.push(json_path);
    Ok(written)
}

/// Write one `operation_p{period}_d{day}.csv` per modeled day under `dir`
/// with hourly hydrogen columns for the requested routes: `h_mwh_{id}`,
/// `p_elec_mw_{id}`, `p_fc_mw_{id}`, `p_comp_mw_{id}`. Indices are 0-based.
pub fn emit_timeseries(
    case: &NetworkCase,
    result: &OperationResult,
    route_ids: &[usize],
    dir: &Path,
) -> Result<Vec<PathBuf>, ReportError> {
    let positions = route_ids
        .iter()
        .map(|&id| {
            case.hydrogen_routes
                .iter()
                .position(|r| r.id == id)
                .filter(|&pos| pos < result.hydrogen.len())
                .ok_or(ReportError::UnknownRoute { route: id })
        })
        .collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(dir)?;

    let horizon = &case.horizon;
    let mut written = Vec::new();
    for p in 0..horizon.n_periods {
        for d in 0..horizon.typical_days_per_year {
            let path = dir.join(format!("operation_p{p}_d{d}.csv"));
            let mut writer = csv::Writer::from_path(&path)?;
            let mut header = vec!["hour".to_string()];
            for &id in route_ids {
                header.push(format!("h_mwh_{id}"));
                header.push(format!("p_elec_mw_{id}"));
                header.push(format!("p_fc_mw_{id}"));
                header.push(format!("p_comp_mw_{id}"));
            }
            writer.write_record(&header)?;
            for t in 0..horizon.intervals_per_day {
                let mut record = vec![t.to_string()];
                for &pos in &positions {
                    let sched = &result.hydrogen[pos];
                    record.push(sched.h_flow.get(p, d, t).to_string());
                    record.push((sched.p_elec.get(p, d, t) * case.mva_base).to_string());
                    record.push((sched.p_fc.get(p, d, t) * case.mva_base).to_string());
                    record.push((sched.p_comp.get(p, d, t) * case.mva_base).to_string());
                }
                writer.write_record(&record)?;
            }
            writer.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}

fn profile_json(profile: &hytep_core::grid::HourlyProfile, scale: f64) -> Value {
    let (periods, days, hours) = profile.dims();
    Value::Array(
        (0..periods)
            .map(|p| {
                Value::Array(
                    (0..days)
                        .map(|d| {
                            Value::Array(
                                (0..hours)
                                    .map(|t| num(profile.get(p, d, t) * scale))
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn keyed_profiles(ids: &[usize], profiles: &[hytep_core::grid::HourlyProfile], scale: f64) -> Value {
    Value::Object(
        ids.iter()
            .zip(profiles)
            .map(|(id, prof)| (id.to_string(), profile_json(prof, scale)))
            .collect(),
    )
}

/// Serialize an evaluated operation to a structured document. Powers are in
/// MW, hydrogen flow in MWh per hour, angles in radians; tensors are nested
/// `[period][day][hour]` arrays keyed by entity id.
pub fn operation_to_json(case: &NetworkCase, result: &OperationResult) -> Value {
    let mw = case.mva_base;
    let labels = &case.horizon.period_labels;
    let gen_ids: Vec<usize> = case.generators.iter().map(|g| g.id).collect();
    let ren_ids: Vec<usize> = case.renewables.iter().map(|r| r.id).collect();
    let line_ids: Vec<usize> = case.lines.iter().map(|l| l.id).collect();
    let cand_ids: Vec<usize> = case.candidate_lines.iter().map(|l| l.id).collect();
    let bus_ids: Vec<usize> = case.buses.iter().map(|b| b.id).collect();
    let route_ids: Vec<usize> = case.hydrogen_routes.iter().map(|r| r.id).collect();

    let lines_built: Vec<Value> = case
        .candidate_lines
        .iter()
        .enumerate()
        .filter_map(|(k, line)| {
            result.plan.line_build_period(k).map(|p| {
                json!({"id": line.id, "build_period": p, "label": labels[p]})
            })
        })
        .collect();
    let routes_built: Vec<Value> = case
        .hydrogen_routes
        .iter()
        .enumerate()
        .filter_map(|(h, route)| {
            result.plan.route_build_period(h).map(|p| {
                json!({"id": route.id, "build_period": p, "label": labels[p]})
            })
        })
        .collect();

    let hydrogen = Value::Object(
        route_ids
            .iter()
            .zip(&result.hydrogen)
            .map(|(id, sched)| {
                (
                    id.to_string(),
                    json!({
                        "h_flow_mwh": profile_json(&sched.h_flow, 1.0),
                        "p_elec_mw": profile_json(&sched.p_elec, mw),
                        "p_fc_mw": profile_json(&sched.p_fc, mw),
                        "p_comp_mw": profile_json(&sched.p_comp, mw),
                    }),
                )
            })
            .collect(),
    );

    json!({
        "plan": {"lines": lines_built, "routes": routes_built},
        "costs": {
            "generation": num(result.costs.generation),
            "new_lines": num(result.costs.new_lines),
            "hydrogen": num(result.costs.hydrogen),
            "shed_penalty_value": num(result.costs.shed_penalty_value),
            "total": num(result.costs.total),
        },
        "objective": num(result.objective),
        "dispatch_mw": keyed_profiles(&gen_ids, &result.dispatch, mw),
        "renewable_out_mw": keyed_profiles(&ren_ids, &result.renewable_out, mw),
        "curtailment_mw": keyed_profiles(&ren_ids, &result.curtailment, mw),
        "flow_mw": keyed_profiles(&line_ids, &result.flows, mw),
        "new_line_flow_mw": keyed_profiles(&cand_ids, &result.new_line_flows, mw),
        "angle_rad": keyed_profiles(&bus_ids, &result.angles, 1.0),
        "shed_mw": keyed_profiles(&bus_ids, &result.shed, mw),
        "hydrogen": hydrogen,
    })
}

/// Flatten every operation tensor into one CSV with a row per index tuple:
/// `quantity,id,period,day,hour,value`.
pub fn emit_operation_flat(
    case: &NetworkCase,
    result: &OperationResult,
    path: &Path,
) -> Result<(), ReportError> {
    let mw = case.mva_base;
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["quantity", "id", "period", "day", "hour", "value"])?;

    let mut write_block = |quantity: &str,
                           ids: &[usize],
                           profiles: &[hytep_core::grid::HourlyProfile],
                           scale: f64|
     -> Result<(), ReportError> {
        for (id, profile) in ids.iter().zip(profiles) {
            let (periods, days, hours) = profile.dims();
            for p in 0..periods {
                for d in 0..days {
                    for t in 0..hours {
                        writer.write_record([
                            quantity.to_string(),
                            id.to_string(),
                            p.to_string(),
                            d.to_string(),
                            t.to_string(),
                            (profile.get(p, d, t) * scale).to_string(),
                        ])?;
                    }
                }
            }
        }
        Ok(())
    };

    let gen_ids: Vec<usize> = case.generators.iter().map(|g| g.id).collect();
    let ren_ids: Vec<usize> = case.renewables.iter().map(|r| r.id).collect();
    let line_ids: Vec<usize> = case.lines.iter().map(|l| l.id).collect();
    let cand_ids: Vec<usize> = case.candidate_lines.iter().map(|l| l.id).collect();
    let bus_ids: Vec<usize> = case.buses.iter().map(|b| b.id).collect();
    let route_ids: Vec<usize> = case.hydrogen_routes.iter().map(|r| r.id).collect();

    write_block("dispatch_mw", &gen_ids, &result.dispatch, mw)?;
    write_block("renewable_out_mw", &ren_ids, &result.renewable_out, mw)?;
    write_block("curtailment_mw", &ren_ids, &result.curtailment, mw)?;
    write_block("flow_mw", &line_ids, &result.flows, mw)?;
    write_block("new_line_flow_mw", &cand_ids, &result.new_line_flows, mw)?;
    write_block("angle_rad", &bus_ids, &result.angles, 1.0)?;
    write_block("shed_mw", &bus_ids, &result.shed, mw)?;

    let h_flows: Vec<_> = result.hydrogen.iter().map(|s| s.h_flow.clone()).collect();
    let p_elecs: Vec<_> = result.hydrogen.iter().map(|s| s.p_elec.clone()).collect();
    let p_fcs: Vec<_> = result.hydrogen.iter().map(|s| s.p_fc.clone()).collect();
    let p_comps: Vec<_> = result.hydrogen.iter().map(|s| s.p_comp.clone()).collect();
    write_block("h_flow_mwh", &route_ids, &h_flows, 1.0)?;
    write_block("p_elec_mw", &route_ids, &p_elecs, mw)?;
    write_block("p_fc_mw", &route_ids, &p_fcs, mw)?;
    write_block("p_comp_mw", &route_ids, &p_comps, mw)?;

    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use hytep_core::fixtures::two_bus_case;
    use hytep_core::operation::{evaluate_plan, InvestmentPlan};

    fn solved_row(round_trip: f64, total: f64) -> ScenarioRow {
        ScenarioRow {
            penetration: None,
            round_trip: Some(round_trip),
            cost_reduction: None,
            status: RowStatus::Solved,
            pipelines_built: 1,
            lines_built: 0,
            construction_periods: vec!["2021-2025".to_string()],
            hydrogen_investment: 2165.0,
            line_investment: 0.0,
            generation_cost: 52.0125,
            shed_penalty_value: 0.0,
            total,
            gap: 0.0,
        }
    }

    fn read(path: &Path) -> String {
        fs::read_to_string(path).unwrap()
    }

    #[test]
    fn one_row_yields_header_plus_one_line() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![solved_row(0.5, 2217.0125)];
        let written = emit_tables(&rows, "tep_h", dir.path()).unwrap();
        assert_eq!(written.len(), 2);
        assert!(written[0].ends_with("tep_h_round_trip.csv"));
        assert!(written[1].ends_with("tep_h_sweep.json"));
        let text = read(&written[0]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "round_trip,status,pipelines_built,lines_built,construction_periods,\
             hydrogen_investment,line_investment,generation_cost,shed_penalty_value,total,gap"
        );
        assert!(lines[1].starts_with("0.5,solved,1,0,2021-2025,2165,"));
    }

    #[test]
    fn failed_rows_keep_their_place_and_status() {
        let dir = tempfile::tempdir().unwrap();
        let mut bad = solved_row(0.1, f64::NAN);
        bad.status = RowStatus::Failed("round-trip target -1 is bad".to_string());
        bad.gap = f64::NAN;
        let rows = vec![bad, solved_row(0.5, 2217.0125)];
        let written = emit_tables(&rows, "tep_h", dir.path()).unwrap();
        let text = read(&written[0]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains(",failed,"));
        assert!(lines[1].contains("NaN"));
        assert!(lines[2].contains(",solved,"));

        let doc: Value = serde_json::from_str(&read(&written[1])).unwrap();
        let row0 = &doc["rows"][0];
        assert_eq!(row0["status"], "failed");
        assert_eq!(row0["total"], Value::Null);
        assert!(row0["error"].as_str().unwrap().contains("round-trip"));
        assert_eq!(doc["rows"][1]["total"], json!(2217.0125));
    }

    #[test]
    fn mixed_families_split_into_separate_tables() {
        let dir = tempfile::tempdir().unwrap();
        let mut base = solved_row(0.5, 2217.0125);
        base.round_trip = None;
        let swept = solved_row(0.5, 2217.0125);
        let written = emit_tables(&[base, swept], "tep_h", dir.path()).unwrap();
        let names: Vec<_> = written
            .iter()
            .map(|p| p.file_name().unwrap().to_str().unwrap().to_string())
            .collect();
        assert_eq!(
            names,
            vec!["tep_h_base.csv", "tep_h_round_trip.csv", "tep_h_sweep.json"]
        );
        // The base family has no axis columns at all.
        let text = read(&written[0]);
        assert!(text.lines().next().unwrap().starts_with("status,"));
    }

    #[test]
    fn no_rows_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            emit_tables(&[], "tep_h", dir.path()),
            Err(ReportError::NoRows)
        ));
    }

    #[test]
    fn timeseries_reports_the_built_route_in_megawatts() {
        let case = two_bus_case();
        let plan = InvestmentPlan::from_build_periods(&[], &[Some(0)], 1);
        let result = evaluate_plan(&case, &plan).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let written = emit_timeseries(&case, &result, &[1], dir.path()).unwrap();
        assert_eq!(written.len(), 1);
        assert!(written[0].ends_with("operation_p0_d0.csv"));
        let text = read(&written[0]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "hour,h_mwh_1,p_elec_mw_1,p_fc_mw_1,p_comp_mw_1");
        // Peak hour: electrolyzer at its 1000 MW rating feeds the 500 MW
        // fuel cell through an 800 MWh/h hydrogen flow.
        let cells: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
        let expect = [0.0, 800.0, 1000.0, 500.0, 0.0];
        for (got, want) in cells.iter().zip(expect) {
            assert!((got - want).abs() < 1e-6, "{lines:?}");
        }
    }

    #[test]
    fn an_unbuilt_route_writes_zero_series() {
        let case = two_bus_case();
        let plan = InvestmentPlan::from_build_periods(&[], &[None], 1);
        let result = evaluate_plan(&case, &plan).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let written = emit_timeseries(&case, &result, &[1], dir.path()).unwrap();
        let text = read(&written[0]);
        assert_eq!(text.lines().nth(1).unwrap(), "0,0,0,0,0");
    }

    #[test]
    fn unknown_route_id_is_rejected() {
        let case = two_bus_case();
        let plan = InvestmentPlan::from_build_periods(&[], &[None], 1);
        let result = evaluate_plan(&case, &plan).unwrap();
        let dir = tempfile::tempdir().unwrap();
        match emit_timeseries(&case, &result, &[7], dir.path()) {
            Err(ReportError::UnknownRoute { route }) => assert_eq!(route, 7),
            other => panic!("expected unknown route, got {other:?}"),
        }
    }

    #[test]
    fn structured_document_carries_plan_costs_and_flows() {
        let case = two_bus_case();
        let plan = InvestmentPlan::from_build_periods(&[], &[Some(0)], 1);
        let result = evaluate_plan(&case, &plan).unwrap();
        let doc = operation_to_json(&case, &result);
        assert_eq!(doc["plan"]["routes"][0]["id"], json!(1));
        assert_eq!(doc["plan"]["routes"][0]["label"], json!("2021-2025"));
        assert_eq!(doc["costs"]["total"], json!(result.costs.total));
        let h = doc["hydrogen"]["1"]["h_flow_mwh"][0][0][0].as_f64().unwrap();
        let pe = doc["hydrogen"]["1"]["p_elec_mw"][0][0][0].as_f64().unwrap();
        assert!((h - 800.0).abs() < 1e-6, "{h}");
        assert!((pe - 1000.0).abs() < 1e-6, "{pe}");
        // Load bus served in full: no shedding.
        let shed = doc["shed_mw"]["2"][0][0][0].as_f64().unwrap();
        assert!(shed.abs() < 1e-9, "{shed}");
    }

    #[test]
    fn flat_csv_has_one_row_per_index_tuple() {
        let case = two_bus_case();
        let plan = InvestmentPlan::from_build_periods(&[], &[Some(0)], 1);
        let result = evaluate_plan(&case, &plan).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flat.csv");
        emit_operation_flat(&case, &result, &path).unwrap();
        let text = read(&path);
        let lines: Vec<&str> = text.lines().collect();
        // 1 generator + 2 renewable tensors + 1 line + 0 candidates
        // + 2 angle + 2 shed + 4 hydrogen tensors, one hour each: 12 rows.
        assert_eq!(lines.len(), 1 + 12);
        assert_eq!(lines[0], "quantity,id,period,day,hour,value");
        let fc = lines
            .iter()
            .find(|l| l.starts_with("p_fc_mw,1,0,0,0,"))
            .and_then(|l| l.rsplit(',').next())
            .and_then(|v| v.parse::<f64>().ok())
            .unwrap();
        assert!((fc - 500.0).abs() < 1e-6, "{fc}");
    }
}
