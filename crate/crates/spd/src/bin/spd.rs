//! Command-line driver: solve single cases, run the shipped presets and
//! bound sweeps, and re-render saved reports. All computation lives in the
//! library; this binary parses flags, dispatches, and writes files.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use spd::experiment::{
    emit_report, load_report_rows, presets, run_bound_sweep, run_case, write_case_outputs,
    CaseSpec, ComparisonRow, ReferenceFamily, ReportFormat, RunOptions, SolverChoice,
};
use spd::{Interval, SolverConfig};

#[derive(Parser)]
#[command(
    name = "spd",
    about = "Shortest-path distributions: minimal CDF arc length under moment constraints",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Directory for density CSVs, overlay SVGs, and JSON reports.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Table format printed to stdout: csv, json, or markdown.
    #[arg(long, default_value = "markdown")]
    format: ReportFormat,
    /// Solver route: direct (per-cell variables) or lambda (multiplier fit).
    #[arg(long, default_value = "direct")]
    solver: String,
    /// Write the per-solve outer-iteration merit log as a CSV.
    #[arg(long)]
    trace: bool,
    /// Seed for the random feasible trial densities.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random feasible trial densities per case (0 disables).
    #[arg(long, default_value_t = 100)]
    trials: usize,
}

impl CommonOpts {
    fn run_options(&self, multistart: usize) -> anyhow::Result<RunOptions> {
        let solver = match self.solver.as_str() {
            "direct" => SolverChoice::Direct,
            "lambda" => SolverChoice::Lambda,
            other => bail!("unknown solver {other:?} (direct, lambda)"),
        };
        Ok(RunOptions {
            solver,
            config: SolverConfig::default(),
            trials: self.trials,
            seed: self.seed,
            multistart,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one case from flags or a JSON case file.
    Solve {
        #[command(flatten)]
        common: CommonOpts,
        /// Case file (JSON, same schema as the emitted reports' `case`).
        #[arg(long, conflicts_with_all = ["a", "b", "mean", "var"])]
        case_file: Option<PathBuf>,
        /// Lower bound of the support.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Upper bound of the support.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Mean constraint (first raw moment).
        #[arg(long, allow_hyphen_values = true)]
        mean: Option<f64>,
        /// Variance constraint; converted to the raw moment mu2 = var + mean^2.
        #[arg(long)]
        var: Option<f64>,
        /// Grid cells.
        #[arg(long, default_value_t = 400)]
        n: usize,
        /// Case name used for output files.
        #[arg(long, default_value = "case")]
        name: String,
        /// Extra perturbed warm starts; the best converged solve wins.
        #[arg(long, default_value_t = 0)]
        multistart: usize,
    },
    /// Run the shipped comparison cases (uniform, texp, bell, bowl).
    Presets {
        #[command(flatten)]
        common: CommonOpts,
        /// Comma-separated subset of preset names.
        #[arg(long)]
        only: Option<String>,
    },
    /// Run a bound sweep preset (texp_sweep or bell_sweep).
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// Which sweep: texp or bell.
        #[arg(long, default_value = "texp")]
        preset: String,
    },
    /// Re-render the table from saved `*_report.json` files.
    Report {
        /// Directory containing saved reports.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Output format: csv, json, or markdown.
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
    },
}

fn case_from_flags(
    a: Option<f64>,
    b: Option<f64>,
    mean: Option<f64>,
    var: Option<f64>,
    n: usize,
    name: String,
) -> anyhow::Result<CaseSpec> {
    let (Some(a), Some(b)) = (a, b) else {
        bail!("either --case-file or both --a and --b are required");
    };
    let interval = Interval::new(a, b)?;
    let (moments, reference) = match (mean, var) {
        (None, None) => (vec![1.0], ReferenceFamily::Uniform),
        (Some(m), None) => {
            if a != 0.0 {
                bail!(
                    "a mean-only case is compared against the truncated exponential, \
                     which needs --a 0 (got {a})"
                );
            }
            (vec![1.0, m], ReferenceFamily::TruncatedExponential)
        }
        (Some(m), Some(v)) => (vec![1.0, m, v + m * m], ReferenceFamily::ScaledBeta),
        (None, Some(_)) => bail!("--var requires --mean"),
    };
    Ok(CaseSpec {
        name,
        interval,
        moments,
        reference,
        n,
        sweep: None,
    })
}

fn print_failures(rows: &[ComparisonRow]) {
    for row in rows {
        if !row.spd_converged {
            eprintln!(
                "warning: case {:?} did not converge; its row is flagged, not hidden",
                row.case
            );
        }
        if let Some(m) = row.trial_margin {
            if m < -1e-6 {
                eprintln!(
                    "warning: case {:?} was beaten by a random feasible trial density \
                     (margin {m:.3e})",
                    row.case
                );
            }
        }
    }
}

fn run_sweep_and_emit(
    case: &CaseSpec,
    common: &CommonOpts,
    opts: &RunOptions,
) -> anyhow::Result<Vec<ComparisonRow>> {
    let sweep = run_bound_sweep(case, opts)?;
    for outcome in &sweep.outcomes {
        write_case_outputs(outcome, &common.out_dir, common.trace)?;
    }
    fs::create_dir_all(&common.out_dir)?;
    fs::write(
        common.out_dir.join(format!("{}_sweep.svg", case.name)),
        &sweep.overlay_svg,
    )?;
    for (name, err) in &sweep.errors {
        eprintln!("warning: sweep stage {name} failed: {err}");
    }
    Ok(sweep.rows())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve {
            common,
            case_file,
            a,
            b,
            mean,
            var,
            n,
            name,
            multistart,
        } => {
            let case = match case_file {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<CaseSpec>(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => case_from_flags(a, b, mean, var, n, name)?,
            };
            let opts = common.run_options(multistart)?;
            let rows = if case.sweep.is_some() {
                run_sweep_and_emit(&case, &common, &opts)?
            } else {
                let outcome = run_case(&case, &opts)?;
                write_case_outputs(&outcome, &common.out_dir, common.trace)?;
                vec![outcome.row.clone()]
            };
            print_failures(&rows);
            print!("{}", emit_report(&rows, common.format));
        }
        Command::Presets { common, only } => {
            let selected: Vec<CaseSpec> = match only {
                None => presets::all_cases(),
                Some(names) => names
                    .split(',')
                    .map(|n| {
                        presets::by_name(n.trim()).with_context(|| format!("unknown preset {n:?}"))
                    })
                    .collect::<anyhow::Result<_>>()?,
            };
            let opts = common.run_options(0)?;
            let mut rows = Vec::new();
            for case in &selected {
                let outcome = run_case(case, &opts)
                    .with_context(|| format!("running preset {:?}", case.name))?;
                write_case_outputs(&outcome, &common.out_dir, common.trace)?;
                rows.push(outcome.row.clone());
            }
            print_failures(&rows);
            print!("{}", emit_report(&rows, common.format));
        }
        Command::Sweep { common, preset } => {
            let case = match preset.as_str() {
                "texp" | "texp_sweep" => presets::texp_sweep(),
                "bell" | "bell_sweep" => presets::bell_sweep(),
                other => bail!("unknown sweep preset {other:?} (texp, bell)"),
            };
            let opts = common.run_options(0)?;
            let rows = run_sweep_and_emit(&case, &common, &opts)?;
            print_failures(&rows);
            print!("{}", emit_report(&rows, common.format));
        }
        Command::Report { out_dir, format } => {
            let rows = load_report_rows(&out_dir)
                .with_context(|| format!("loading reports from {}", out_dir.display()))?;
            print!("{}", emit_report(&rows, format));
        }
    }
    Ok(())
}
