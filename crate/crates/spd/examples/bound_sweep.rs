//! Re-solve a case on widening supports. With the mean pinned far below the
//! midpoint, the solution concentrates into an ever sharper spike and the
//! optimal path length grows without bound, which is the numerical face of
//! the argument that these distributions only exist on bounded supports.
//!
//!     cargo run --example bound_sweep

use std::fs;

use spd::experiment::{emit_report, presets, run_bound_sweep, ReportFormat, RunOptions};

fn main() -> anyhow::Result<()> {
    let opts = RunOptions {
        trials: 0,
        ..RunOptions::default()
    };

    for case in [presets::texp_sweep(), presets::bell_sweep()] {
        println!("== {} ==", case.name);
        let sweep = run_bound_sweep(&case, &opts)?;
        for outcome in &sweep.outcomes {
            println!(
                "  [{:>5}, {:>4}]  n={:<5} path length {:.6}  peak density {:>9.3}",
                outcome.case.interval.lower(),
                outcome.case.interval.upper(),
                outcome.solve.density.partition().len(),
                outcome.row.spd_path_length,
                outcome.row.peak_density,
            );
        }
        println!("{}", emit_report(&sweep.rows(), ReportFormat::Markdown));

        fs::create_dir_all("out")?;
        let svg = format!("out/{}_sweep.svg", case.name);
        fs::write(&svg, &sweep.overlay_svg)?;
        println!("overlay written to {svg}\n");
    }
    Ok(())
}
