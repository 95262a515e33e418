//! Concurrent sweep driver.
//!
//! Axis points are independent MILPs, so they are solved on worker threads;
//! rows are then assembled single-threaded in the same lexicographic order
//! `run_sweep` uses, making the output identical to the sequential run.

use hytep_core::grid::NetworkCase;
use hytep_core::scenario::{run_sweep, ModelChoice, ScenarioRow, SolveParams, SweepAxis};

type Point = (Option<f64>, Option<f64>, Option<f64>);

/// All axis combinations in sweep order; an empty axis contributes the
/// single value "not swept".
fn combinations(axes: &SweepAxis) -> Vec<Point> {
    fn levels(axis: &[f64]) -> Vec<Option<f64>> {
        if axis.is_empty() {
            vec![None]
        } else {
            axis.iter().copied().map(Some).collect()
        }
    }
    let mut points = Vec::new();
    for &pen in &levels(&axes.penetration_levels) {
        for &rt in &levels(&axes.round_trip_levels) {
            for &cost in &levels(&axes.cost_reductions) {
                points.push((pen, rt, cost));
            }
        }
    }
    points
}

fn single_point((pen, rt, cost): Point) -> SweepAxis {
    SweepAxis {
        penetration_levels: pen.into_iter().collect(),
        round_trip_levels: rt.into_iter().collect(),
        cost_reductions: cost.into_iter().collect(),
    }
}

/// `run_sweep` with axis points distributed over up to `threads` workers
/// (0 = one per available CPU). Output matches the sequential sweep exactly.
pub fn run_sweep_parallel(
    case: &NetworkCase,
    axes: &SweepAxis,
    choice: ModelChoice,
    params: &SolveParams,
    threads: usize,
) -> Vec<ScenarioRow> {
    let points = combinations(axes);
    let threads = if threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        threads
    }
    .min(points.len());
    if threads <= 1 {
        return run_sweep(case, axes, choice, params);
    }

    let mut indexed: Vec<(usize, ScenarioRow)> = std::thread::scope(|scope| {
        let points = &points;
        let workers: Vec<_> = (0..threads)
            .map(|worker| {
                scope.spawn(move || {
                    points
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| i % threads == worker)
                        .map(|(i, &point)| {
                            let mut rows =
                                run_sweep(case, &single_point(point), choice, params);
                            debug_assert_eq!(rows.len(), 1);
                            (i, rows.pop().expect("a single axis point yields one row"))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        workers
            .into_iter()
            .flat_map(|w| w.join().expect("sweep worker panicked"))
            .collect()
    });
    indexed.sort_by_key(|(i, _)| *i);
    indexed.into_iter().map(|(_, row)| row).collect()
}
