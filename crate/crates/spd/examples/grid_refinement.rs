//! Warm-started grid refinement: solve the same case on doubling grids and
//! watch the optimal path length settle (the gaps shrink like 1/n^2).
//!
//!     cargo run --example grid_refinement

use spd::optimize::SolverConfig;
use spd::solver::refine_solve;
use spd::{Interval, MomentSpec};

fn main() -> spd::Result<()> {
    let interval = Interval::new(0.0, 0.1)?;
    let spec = MomentSpec::new(&interval, vec![1.0, 0.04])?;
    let schedule = [50, 100, 200, 400, 800];

    let reports = refine_solve(interval, &spec, &schedule, &SolverConfig::default())?;
    println!(
        "{:>6} {:>16} {:>12} {:>10}",
        "n", "path length", "gap", "inner"
    );
    let mut previous: Option<f64> = None;
    for (n, report) in schedule.iter().zip(&reports) {
        let gap = previous
            .map(|p| format!("{:.3e}", (report.path_length - p).abs()))
            .unwrap_or_else(|| "-".into());
        println!(
            "{n:>6} {:>16.12} {gap:>12} {:>10}",
            report.path_length, report.diagnostics.inner_iterations
        );
        previous = Some(report.path_length);
    }
    Ok(())
}
