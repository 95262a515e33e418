//! Command-line front end.
//!
//! Six subcommands: `validate`, `plan`, `evaluate`, `sweep`, `export-mps`
//! and `oracle-check`. Exit codes: 0 success, 2 usage error, 3 data error
//! (unreadable/invalid case or plan files, report I/O), 4 solver failure.
//! Errors additionally land on standard error as a one-line JSON document
//! `{"error":{"kind":...,"message":...}}`. No subcommand ever modifies its
//! input files.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use hytep_core::formulation::cost_breakdown;
use hytep_core::grid::NetworkCase;
use hytep_core::operation::{evaluate_plan, EvaluateError, InvestmentPlan};
use hytep_core::oracle::{
    brute_force_optimum, brute_force_optimum_lines_only, OracleError, DEFAULT_PLAN_CAP,
};
use hytep_core::scenario::{ModelChoice, RowStatus, SolveParams, SweepAxis};
use hytep_core::solver::{
    solve_milp, write_mps, MilpSolution, MilpStatus, GAP_DENOM_EPS, DEFAULT_NODE_LIMIT,
};

use crate::casefile::{load_case, parse_case};
use crate::report::{emit_operation_flat, emit_tables, emit_timeseries, operation_to_json};
use crate::sweep::run_sweep_parallel;

#[derive(Parser)]
#[command(
    name = "hytep",
    version,
    about = "Co-expansion planning of electric and hydrogen transmission"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a case file against the format and model rules.
    Validate(ValidateArgs),
    /// Solve the chosen expansion model; write the plan and its operation.
    Plan(PlanArgs),
    /// Re-dispatch a fixed plan file against a case.
    Evaluate(EvaluateArgs),
    /// Solve a grid of scenario transforms and write report tables.
    Sweep(SweepArgs),
    /// Write the chosen model as an MPS file for an external solver.
    ExportMps(ExportArgs),
    /// Compare branch-and-bound against brute-force plan enumeration.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct CaseArg {
    /// Case file (JSON, MW units).
    #[arg(long, value_name = "FILE")]
    case: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Candidate lines plus hydrogen routes.
    TepH,
    /// Lines-only benchmark.
    TepT,
}

impl From<ModelArg> for ModelChoice {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::TepH => ModelChoice::TepH,
            ModelArg::TepT => ModelChoice::TepT,
        }
    }
}

#[derive(Args)]
struct SolveOpts {
    /// Expansion model to solve.
    #[arg(long, value_enum, default_value = "tep-h")]
    model: ModelArg,
    /// Relative optimality gap target, in (0, 1).
    #[arg(long, default_value_t = 0.001)]
    gap: f64,
    /// Branch-and-bound node budget.
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: usize,
}

#[derive(Args)]
struct OutDir {
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    case: CaseArg,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    case: CaseArg,
    #[command(flatten)]
    solve: SolveOpts,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    case: CaseArg,
    /// Plan file listing the build decisions to freeze.
    #[arg(long, value_name = "FILE")]
    plan: PathBuf,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    case: CaseArg,
    #[command(flatten)]
    solve: SolveOpts,
    #[command(flatten)]
    out: OutDir,
    /// Renewable penetration levels to sweep (energy fraction of demand).
    #[arg(long, value_delimiter = ',', value_name = "F,...")]
    penetration: Vec<f64>,
    /// Round-trip efficiency levels to sweep.
    #[arg(long, value_delimiter = ',', value_name = "F,...")]
    round_trip: Vec<f64>,
    /// Hydrogen capital cost reductions to sweep.
    #[arg(long, value_delimiter = ',', value_name = "F,...")]
    cost_reduction: Vec<f64>,
    /// Worker threads for axis points (0 = one per CPU).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    case: CaseArg,
    /// Expansion model to export.
    #[arg(long, value_enum, default_value = "tep-h")]
    model: ModelArg,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    case: CaseArg,
    #[command(flatten)]
    solve: SolveOpts,
    /// Refuse to enumerate more plans than this.
    #[arg(long, default_value_t = DEFAULT_PLAN_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ErrorKind {
    Usage,
    Data,
    Solver,
}

struct CmdError {
    kind: ErrorKind,
    message: String,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> Self {
        CmdError {
            kind: ErrorKind::Usage,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        CmdError {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        CmdError {
            kind: ErrorKind::Solver,
            message: message.into(),
        }
    }

    fn kind_str(&self) -> &'static str {
        match self.kind {
            ErrorKind::Usage => "usage",
            ErrorKind::Data => "data",
            ErrorKind::Solver => "solver",
        }
    }

    fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Usage => 2,
            ErrorKind::Data => 3,
            ErrorKind::Solver => 4,
        }
    }
}

impl From<crate::casefile::CaseError> for CmdError {
    fn from(e: crate::casefile::CaseError) -> Self {
        CmdError::data(e.to_string())
    }
}

impl From<crate::report::ReportError> for CmdError {
    fn from(e: crate::report::ReportError) -> Self {
        CmdError::data(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::data(format!("cannot write output: {e}"))
    }
}

impl From<hytep_core::solver::SolveError> for CmdError {
    fn from(e: hytep_core::solver::SolveError) -> Self {
        CmdError::solver(e.to_string())
    }
}

impl From<hytep_core::formulation::BuildError> for CmdError {
    fn from(e: hytep_core::formulation::BuildError) -> Self {
        CmdError::data(format!("cannot build model: {e}"))
    }
}

impl From<EvaluateError> for CmdError {
    fn from(e: EvaluateError) -> Self {
        match e {
            EvaluateError::Build(b) => CmdError::data(format!("cannot build model: {b}")),
            other => CmdError::solver(other.to_string()),
        }
    }
}

fn print_error(kind: &str, message: &str) {
    eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
}

/// Parse and dispatch; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as ClapKind;
            if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            print_error("usage", &e.to_string());
            return 2;
        }
    };
    let outcome = match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Plan(args) => cmd_plan(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::ExportMps(args) => cmd_export_mps(&args),
        Command::OracleCheck(args) => cmd_oracle_check(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            print_error(e.kind_str(), &e.message);
            e.exit_code()
        }
    }
}

fn checked_gap(gap: f64) -> Result<f64, CmdError> {
    if gap > 0.0 && gap < 1.0 {
        Ok(gap)
    } else {
        Err(CmdError::usage(format!(
            "--gap must lie strictly between 0 and 1, got {gap}"
        )))
    }
}

fn read_case(path: &Path) -> Result<NetworkCase, CmdError> {
    Ok(load_case(path)?)
}

fn status_str(status: MilpStatus) -> &'static str {
    match status {
        MilpStatus::Optimal => "optimal",
        MilpStatus::NodeLimit => "node_limit",
        MilpStatus::Infeasible => "infeasible",
    }
}

/// Solve and insist on an incumbent; infeasibility or an empty node-limit
/// exit is a solver failure.
fn solve_to_incumbent(
    model: &hytep_core::formulation::MilpModel,
    gap: f64,
    node_limit: usize,
) -> Result<MilpSolution, CmdError> {
    let solution = solve_milp(model, gap, node_limit)?;
    match solution.status {
        MilpStatus::Infeasible => Err(CmdError::solver("planning model is infeasible")),
        MilpStatus::NodeLimit if solution.values.is_empty() => Err(CmdError::solver(
            "node limit reached before any feasible plan was found",
        )),
        _ => Ok(solution),
    }
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CmdError> {
    let text = fs::read_to_string(&args.case.case)
        .map_err(|e| CmdError::data(format!("cannot read case file: {e}")))?;
    let case = parse_case(&text)?;
    let violations = case.validate();
    if violations.is_empty() {
        println!(
            "ok: {} buses, {} generators, {} renewables, {} lines, {} candidate lines, {} hydrogen routes",
            case.buses.len(),
            case.generators.len(),
            case.renewables.len(),
            case.lines.len(),
            case.candidate_lines.len(),
            case.hydrogen_routes.len()
        );
        Ok(())
    } else {
        for v in &violations {
            println!("{v}");
        }
        Err(CmdError::data(format!(
            "case fails {} validation rule(s)",
            violations.len()
        )))
    }
}

fn build_list(case: &NetworkCase, plan: &InvestmentPlan) -> (Vec<Value>, Vec<Value>) {
    let labels = &case.horizon.period_labels;
    let lines = case
        .candidate_lines
        .iter()
        .enumerate()
        .filter_map(|(k, line)| {
            plan.line_build_period(k)
                .map(|p| json!({"id": line.id, "period": p, "label": labels[p]}))
        })
        .collect();
    let routes = case
        .hydrogen_routes
        .iter()
        .enumerate()
        .filter_map(|(h, route)| {
            plan.route_build_period(h)
                .map(|p| json!({"id": route.id, "period": p, "label": labels[p]}))
        })
        .collect();
    (lines, routes)
}

fn write_json(path: &Path, doc: &Value) -> Result<(), CmdError> {
    let mut text = serde_json::to_string_pretty(doc).expect("json documents always serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Write the operation artifacts shared by `plan` and `evaluate`:
/// `operation.json`, per-day hydrogen series, and the flat tensor CSV.
fn write_operation(
    case: &NetworkCase,
    result: &hytep_core::operation::OperationResult,
    out: &Path,
) -> Result<(), CmdError> {
    write_json(&out.join("operation.json"), &operation_to_json(case, result))?;
    let route_ids: Vec<usize> = case.hydrogen_routes.iter().map(|r| r.id).collect();
    emit_timeseries(case, result, &route_ids, out)?;
    emit_operation_flat(case, result, &out.join("operation_flat.csv"))?;
    Ok(())
}

fn cmd_plan(args: &PlanArgs) -> Result<(), CmdError> {
    let gap = checked_gap(args.solve.gap)?;
    let case = read_case(&args.case.case)?;
    let choice: ModelChoice = args.solve.model.into();
    let model = choice.build(&case)?;
    let solution = solve_to_incumbent(&model, gap, args.solve.node_limit)?;
    let plan = InvestmentPlan::from_solution(&model, &solution.values, &case);
    let costs = cost_breakdown(&model, &solution.values, &case)
        .map_err(|e| CmdError::data(e.to_string()))?;

    fs::create_dir_all(&args.out.out)?;
    let (lines, routes) = build_list(&case, &plan);
    let plan_doc = json!({
        "model": choice.as_str(),
        "status": status_str(solution.status),
        "objective": solution.objective,
        "best_bound": solution.best_bound,
        "gap": solution.gap,
        "nodes": solution.nodes,
        "builds": {"lines": lines, "routes": routes},
        "costs": {
            "generation": costs.generation,
            "new_lines": costs.new_lines,
            "hydrogen": costs.hydrogen,
            "shed_penalty_value": costs.shed_penalty_value,
            "total": costs.total,
        },
    });
    write_json(&args.out.out.join("plan.json"), &plan_doc)?;

    let result = evaluate_plan(&case, &plan)?;
    write_operation(&case, &result, &args.out.out)?;
    println!(
        "{} {}: total {:.6}, gap {:.2e}, {} lines and {} routes built",
        choice.as_str(),
        status_str(solution.status),
        solution.objective,
        solution.gap,
        lines_count(&plan),
        routes_count(&plan),
    );
    Ok(())
}

fn lines_count(plan: &InvestmentPlan) -> usize {
    (0..plan.line_built.len())
        .filter(|&k| plan.line_build_period(k).is_some())
        .count()
}

fn routes_count(plan: &InvestmentPlan) -> usize {
    (0..plan.h_built.len())
        .filter(|&h| plan.route_build_period(h).is_some())
        .count()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanFile {
    #[serde(default)]
    lines: Vec<BuildEntry>,
    #[serde(default)]
    routes: Vec<BuildEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildEntry {
    id: usize,
    period: usize,
}

fn read_plan(path: &Path, case: &NetworkCase) -> Result<InvestmentPlan, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::data(format!("cannot read plan file: {e}")))?;
    let file: PlanFile = serde_json::from_str(&text)
        .map_err(|e| CmdError::data(format!("malformed plan file: {e}")))?;

    let mut lines = vec![None; case.candidate_lines.len()];
    for entry in &file.lines {
        let k = case
            .candidate_lines
            .iter()
            .position(|l| l.id == entry.id)
            .ok_or_else(|| CmdError::data(format!("plan names unknown candidate line {}", entry.id)))?;
        lines[k] = Some(entry.period);
    }
    let mut routes = vec![None; case.hydrogen_routes.len()];
    for entry in &file.routes {
        let h = case
            .hydrogen_routes
            .iter()
            .position(|r| r.id == entry.id)
            .ok_or_else(|| CmdError::data(format!("plan names unknown hydrogen route {}", entry.id)))?;
        routes[h] = Some(entry.period);
    }
    for period in lines.iter().chain(&routes).flatten() {
        if *period >= case.horizon.n_periods {
            return Err(CmdError::data(format!(
                "plan build period {period} is outside the {}-period horizon",
                case.horizon.n_periods
            )));
        }
    }
    let plan = InvestmentPlan::from_build_periods(&lines, &routes, case.horizon.n_periods);
    plan.check(case)
        .map_err(|e| CmdError::data(format!("inconsistent plan: {e}")))?;
    Ok(plan)
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CmdError> {
    let case = read_case(&args.case.case)?;
    let plan = read_plan(&args.plan, &case)?;
    let result = evaluate_plan(&case, &plan)?;
    fs::create_dir_all(&args.out.out)?;
    write_operation(&case, &result, &args.out.out)?;
    println!(
        "operation cost {:.6} (generation {:.6}, shed penalty {:.6})",
        result.objective, result.costs.generation, result.costs.shed_penalty_value
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CmdError> {
    let gap = checked_gap(args.solve.gap)?;
    let case = read_case(&args.case.case)?;
    let choice: ModelChoice = args.solve.model.into();
    let axes = SweepAxis {
        penetration_levels: args.penetration.clone(),
        round_trip_levels: args.round_trip.clone(),
        cost_reductions: args.cost_reduction.clone(),
    };
    let params = SolveParams {
        gap_target: gap,
        node_limit: args.solve.node_limit,
    };
    let rows = run_sweep_parallel(&case, &axes, choice, &params, args.threads);
    let failed = rows
        .iter()
        .filter(|r| matches!(r.status, RowStatus::Failed(_)))
        .count();
    let written = emit_tables(&rows, choice.as_str(), &args.out.out)?;
    for path in &written {
        println!("{}", path.display());
    }
    println!("{} rows ({} failed)", rows.len(), failed);
    Ok(())
}

fn cmd_export_mps(args: &ExportArgs) -> Result<(), CmdError> {
    let case = read_case(&args.case.case)?;
    let choice: ModelChoice = args.model.into();
    let model = choice.build(&case)?;
    fs::create_dir_all(&args.out.out)?;
    let stem = args
        .case
        .case
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "case".to_string());
    let path = args.out.out.join(format!("{stem}_{}.mps", choice.as_str()));
    fs::write(&path, write_mps(&model))?;
    println!("{}", path.display());
    Ok(())
}

fn cmd_oracle_check(args: &OracleArgs) -> Result<(), CmdError> {
    let gap = checked_gap(args.solve.gap)?;
    let case = read_case(&args.case.case)?;
    let choice: ModelChoice = args.solve.model.into();
    let model = choice.build(&case)?;
    let solution = solve_to_incumbent(&model, gap, args.solve.node_limit)?;

    let oracle = match choice {
        ModelChoice::TepH => brute_force_optimum(&case, args.cap),
        ModelChoice::TepT => brute_force_optimum_lines_only(&case, args.cap),
    }
    .map_err(|e| match e {
        OracleError::CapExceeded { .. } => CmdError::data(e.to_string()),
        other => CmdError::solver(other.to_string()),
    })?;

    let denom = oracle.total.abs().max(GAP_DENOM_EPS);
    let relative_gap = (solution.objective - oracle.total).abs() / denom;
    println!(
        "{}",
        json!({
            "model": choice.as_str(),
            "milp_total": solution.objective,
            "oracle_total": oracle.total,
            "relative_gap": relative_gap,
            "gap_target": gap,
        })
    );
    if relative_gap <= gap {
        Ok(())
    } else {
        Err(CmdError::solver(format!(
            "branch-and-bound total {} misses the enumerated optimum {} (relative gap {relative_gap:.3e} > {gap})",
            solution.objective, oracle.total
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hytep_core::fixtures::two_bus_case;

    fn write_two_bus(dir: &Path) -> PathBuf {
        let path = dir.join("two_bus.json");
        crate::casefile::save_case(&two_bus_case(), &path).unwrap();
        path
    }

    fn run_vec(args: &[&str]) -> i32 {
        run(std::iter::once("hytep").chain(args.iter().copied()))
    }

    #[test]
    fn validate_accepts_the_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        assert_eq!(run_vec(&["validate", "--case", case.to_str().unwrap()]), 0);
    }

    #[test]
    fn validate_rejects_a_broken_case_with_exit_3() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        let text = fs::read_to_string(&case)
            .unwrap()
            .replace("\"is_slack\": true", "\"is_slack\": false");
        let bad = dir.path().join("broken.json");
        fs::write(&bad, text).unwrap();
        assert_eq!(run_vec(&["validate", "--case", bad.to_str().unwrap()]), 3);
    }

    #[test]
    fn missing_case_file_is_a_data_error() {
        assert_eq!(run_vec(&["validate", "--case", "/nonexistent.json"]), 3);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_vec(&["no-such-command"]), 2);
        assert_eq!(run_vec(&["plan"]), 2); // --case is required
    }

    #[test]
    fn bad_gap_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        let code = run_vec(&[
            "plan",
            "--case",
            case.to_str().unwrap(),
            "--gap",
            "1.5",
        ]);
        assert_eq!(code, 2);
    }

    #[test]
    fn plan_writes_the_expected_artifacts_and_keeps_the_case_intact() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        let before = fs::read_to_string(&case).unwrap();
        let out = dir.path().join("out");
        let code = run_vec(&[
            "plan",
            "--case",
            case.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert_eq!(fs::read_to_string(&case).unwrap(), before);

        let plan: Value =
            serde_json::from_str(&fs::read_to_string(out.join("plan.json")).unwrap()).unwrap();
        assert_eq!(plan["status"], "optimal");
        assert_eq!(plan["builds"]["routes"][0]["id"], json!(1));
        assert_eq!(plan["builds"]["routes"][0]["period"], json!(0));
        let total = plan["costs"]["total"].as_f64().unwrap();
        assert!((total - 2217.0125).abs() < 1e-6, "{total}");
        assert!(out.join("operation.json").is_file());
        assert!(out.join("operation_p0_d0.csv").is_file());
        assert!(out.join("operation_flat.csv").is_file());
    }

    #[test]
    fn evaluate_reproduces_the_planned_operation() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        let plan_path = dir.path().join("plan_in.json");
        fs::write(&plan_path, r#"{"routes": [{"id": 1, "period": 0}]}"#).unwrap();
        let out = dir.path().join("out");
        let code = run_vec(&[
            "evaluate",
            "--case",
            case.to_str().unwrap(),
            "--plan",
            plan_path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let doc: Value =
            serde_json::from_str(&fs::read_to_string(out.join("operation.json")).unwrap())
                .unwrap();
        let gen = doc["costs"]["generation"].as_f64().unwrap();
        assert!((gen - 52.0125).abs() < 1e-6, "{gen}");
    }

    #[test]
    fn evaluate_rejects_unknown_ids_and_bad_periods() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        let plan_path = dir.path().join("plan_in.json");

        fs::write(&plan_path, r#"{"routes": [{"id": 9, "period": 0}]}"#).unwrap();
        let args = [
            "evaluate",
            "--case",
            case.to_str().unwrap(),
            "--plan",
            plan_path.to_str().unwrap(),
        ];
        assert_eq!(run_vec(&args), 3);

        fs::write(&plan_path, r#"{"routes": [{"id": 1, "period": 5}]}"#).unwrap();
        assert_eq!(run_vec(&args), 3);
    }

    #[test]
    fn sweep_writes_family_tables() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        let out = dir.path().join("out");
        let code = run_vec(&[
            "sweep",
            "--case",
            case.to_str().unwrap(),
            "--round-trip",
            "0.4,0.5",
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "2",
        ]);
        assert_eq!(code, 0);
        let table = fs::read_to_string(out.join("tep_h_round_trip.csv")).unwrap();
        assert_eq!(table.lines().count(), 3);
        assert!(out.join("tep_h_sweep.json").is_file());
    }

    #[test]
    fn export_mps_names_the_file_after_case_and_model() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        let out = dir.path().join("out");
        let code = run_vec(&[
            "export-mps",
            "--case",
            case.to_str().unwrap(),
            "--model",
            "tep-t",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = fs::read_to_string(out.join("two_bus_tep_t.mps")).unwrap();
        assert!(text.starts_with("NAME"));
        hytep_core::solver::parse_mps(&text).unwrap();
    }

    #[test]
    fn oracle_check_passes_on_the_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let case = write_two_bus(dir.path());
        assert_eq!(
            run_vec(&["oracle-check", "--case", case.to_str().unwrap()]),
            0
        );
    }
}
