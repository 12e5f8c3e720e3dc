//! Acceptance suite: one test per shipped criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them all).
//!
//! Two clauses of criteria 2 and 3 pin comparison values for the
//! mean-constrained case that are not attainable: any normalized density on
//! [0, 0.1] has CDF arc length between 1.00499 and 1.1, and the matched
//! truncated exponential's is 1.00564 by closed form, so an arc length of
//! 1.017 (and the difference ratio near 11 built from it) cannot come out
//! of a correct implementation. Those assertions are kept exactly as
//! specified for this gate and fail honestly with the measured values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spd::density::{Interval, MomentSpec, Partition, PiecewiseDensity};
use spd::experiment::{presets, run_bound_sweep, run_case, RunOptions, SolverChoice};
use spd::optimize::SolverConfig;
use spd::parametric::{fit_multipliers, induced_density, initial_multipliers};
use spd::reference::ReferenceKind;
use spd::solver::{
    project_to_moments, refine_solve, sample_feasible_density, solve_spd, SpdProblem,
};

fn opts_no_trials() -> RunOptions {
    RunOptions {
        trials: 0,
        ..RunOptions::default()
    }
}

fn check(line: &mut Vec<String>, ok: bool, what: &str) -> bool {
    line.push(format!("{} {}", if ok { "pass:" } else { "FAIL:" }, what));
    ok
}

fn report(criterion: &str, clauses: Vec<String>, all_ok: bool) {
    println!(
        "acceptance {criterion}: {} [{}]",
        if all_ok { "PASS" } else { "FAIL" },
        clauses.join("; ")
    );
    assert!(all_ok, "{criterion}: {}", clauses.join("; "));
}

#[test]
fn criterion_1_mass_only_solution_is_uniform() {
    let outcome = run_case(&presets::uniform_case(), &opts_no_trials()).unwrap();
    let mut clauses = Vec::new();
    let mut ok = true;
    ok &= check(&mut clauses, outcome.row.spd_converged, "solver converged");
    let sqrt2 = std::f64::consts::SQRT_2;
    ok &= check(
        &mut clauses,
        (outcome.row.spd_path_length - sqrt2).abs() <= 1e-6,
        &format!(
            "path length {:.9} = sqrt(2) +- 1e-6",
            outcome.row.spd_path_length
        ),
    );
    ok &= check(
        &mut clauses,
        (outcome.row.spd_uniformity - 1.0).abs() <= 1e-6,
        &format!("uniformity {:.9} = 1 +- 1e-6", outcome.row.spd_uniformity),
    );
    report("criterion 1 (mass-only case)", clauses, ok);
}

#[test]
fn criterion_2_mean_case_path_lengths() {
    let outcome = run_case(&presets::texp_case(), &opts_no_trials()).unwrap();
    let mut clauses = Vec::new();
    let mut ok = true;
    ok &= check(
        &mut clauses,
        (outcome.row.spd_path_length - 1.006).abs() <= 0.005,
        &format!(
            "spd length {:.6} in 1.006 +- 0.005",
            outcome.row.spd_path_length
        ),
    );
    let ReferenceKind::TruncatedExponential { rate } = *outcome.reference.kind() else {
        panic!("mean case must match a truncated exponential");
    };
    ok &= check(
        &mut clauses,
        (rate - 12.3).abs() <= 0.05,
        &format!("fitted rate {rate:.4} in 12.3 +- 0.05"),
    );
    ok &= check(
        &mut clauses,
        (outcome.row.me_path_length - 1.017).abs() <= 0.005,
        &format!(
            "me length {:.6} in 1.017 +- 0.005 (true arc length of the matched \
             truncated exponential is 1.00564; the asserted band is not attainable)",
            outcome.row.me_path_length
        ),
    );
    report("criterion 2 (mean case lengths)", clauses, ok);
}

#[test]
fn criterion_3_mean_case_difference_ratio() {
    let outcome = run_case(&presets::texp_case(), &opts_no_trials()).unwrap();
    let row = &outcome.row;
    let ratio = row.difference_ratio.expect("non-degenerate case");
    let mut clauses = Vec::new();
    let mut ok = true;
    let identity = (row.me_path_length - row.baseline) / (row.spd_path_length - row.baseline);
    ok &= check(
        &mut clauses,
        (ratio - identity).abs() <= 1e-9,
        &format!("ratio identity holds exactly ({ratio:.9} vs {identity:.9})"),
    );
    ok &= check(
        &mut clauses,
        (7.0..=15.0).contains(&ratio),
        &format!(
            "ratio {ratio:.4} in [7, 15] (the ratio of the true arc lengths is 1.10; \
             the asserted band descends from the unattainable 1.017)"
        ),
    );
    report("criterion 3 (difference ratio)", clauses, ok);
}

#[test]
fn criterion_4_bell_case() {
    let outcome = run_case(&presets::bell_case(), &opts_no_trials()).unwrap();
    let mut clauses = Vec::new();
    let mut ok = true;
    let ReferenceKind::ScaledBeta { alpha, beta } = *outcome.reference.kind() else {
        panic!("bell case must match a scaled beta");
    };
    ok &= check(
        &mut clauses,
        (alpha - 4.5).abs() <= 1e-8 && (beta - 4.5).abs() <= 1e-8,
        &format!("shapes ({alpha:.9}, {beta:.9}) = (4.5, 4.5) +- 1e-8"),
    );
    ok &= check(
        &mut clauses,
        (outcome.row.me_path_length - 1.06).abs() <= 0.005,
        &format!(
            "me length {:.6} in 1.06 +- 0.005",
            outcome.row.me_path_length
        ),
    );
    ok &= check(
        &mut clauses,
        (outcome.row.spd_path_length - 1.04).abs() <= 0.005,
        &format!(
            "spd length {:.6} in 1.04 +- 0.005",
            outcome.row.spd_path_length
        ),
    );
    let ratio = outcome.row.difference_ratio.unwrap();
    ok &= check(
        &mut clauses,
        (ratio - 2.0).abs() <= 0.7,
        &format!("ratio {ratio:.4} in 2 +- 0.7"),
    );
    report("criterion 4 (bell case)", clauses, ok);
}

#[test]
fn criterion_5_bowl_case() {
    let outcome = run_case(&presets::bowl_case(), &opts_no_trials()).unwrap();
    let mut clauses = Vec::new();
    let mut ok = true;
    let ReferenceKind::ScaledBeta { alpha, beta } = *outcome.reference.kind() else {
        panic!("bowl case must match a scaled beta");
    };
    ok &= check(
        &mut clauses,
        (alpha - 0.5).abs() <= 1e-8 && (beta - 0.5).abs() <= 1e-8,
        &format!("shapes ({alpha:.9}, {beta:.9}) = (0.5, 0.5) +- 1e-8"),
    );
    ok &= check(
        &mut clauses,
        (outcome.row.spd_path_length - 1.02).abs() <= 0.005,
        &format!(
            "spd length {:.6} in 1.02 +- 0.005",
            outcome.row.spd_path_length
        ),
    );
    ok &= check(
        &mut clauses,
        (outcome.row.me_path_length - 1.02).abs() <= 0.005,
        &format!(
            "me length {:.6} in 1.02 +- 0.005",
            outcome.row.me_path_length
        ),
    );
    ok &= check(
        &mut clauses,
        (outcome.row.spd_path_length - outcome.row.me_path_length).abs() <= 0.003,
        &format!(
            "lengths equal within 0.003 (gap {:.2e})",
            (outcome.row.spd_path_length - outcome.row.me_path_length).abs()
        ),
    );
    report("criterion 5 (bowl case)", clauses, ok);
}

#[test]
fn criterion_6_minimality_against_trial_densities() {
    let mut clauses = Vec::new();
    let mut ok = true;
    for case in presets::all_cases() {
        let outcome = run_case(&case, &opts_no_trials()).unwrap();
        assert!(outcome.row.spd_converged, "{} must converge", case.name);
        let partition = outcome.solve.density.partition().clone();
        let spec = case.moment_spec().unwrap();

        // trial 1: the discretized ME reference, projected to exact
        // feasibility (midpoint sampling of the bowl's singular edges loses
        // mass, so the raw sample is not a valid trial solution)
        let me_values = project_to_moments(&partition, &spec, outcome.me_density.values()).unwrap();
        let me_trial = PiecewiseDensity::new(partition.clone(), me_values).unwrap();
        let me_margin = me_trial.path_length() - outcome.row.spd_path_length;
        ok &= check(
            &mut clauses,
            me_margin >= -1e-6,
            &format!(
                "{}: beats the discretized ME trial (margin {me_margin:.3e})",
                case.name
            ),
        );

        // trials 2..101: random feasible densities
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut min_margin = f64::INFINITY;
        for _ in 0..100 {
            let trial = sample_feasible_density(&partition, &spec, &mut rng).unwrap();
            min_margin = min_margin.min(trial.path_length() - outcome.row.spd_path_length);
        }
        ok &= check(
            &mut clauses,
            min_margin >= -1e-6,
            &format!(
                "{}: beats 100 random feasible trials (min margin {min_margin:.3e})",
                case.name
            ),
        );
    }
    report("criterion 6 (trial-solution minimality)", clauses, ok);
}

#[test]
fn criterion_7_moment_fidelity() {
    let mut clauses = Vec::new();
    let mut ok = true;
    for case in presets::all_cases() {
        let outcome = run_case(&case, &opts_no_trials()).unwrap();
        assert!(outcome.row.spd_converged);
        let spec = case.moment_spec().unwrap();
        let worst = outcome
            .solve
            .achieved_moments
            .iter()
            .zip(spec.targets())
            .map(|(a, t)| (a - t).abs())
            .fold(0.0f64, f64::max);
        ok &= check(
            &mut clauses,
            worst <= 1e-8,
            &format!("{}: raw moments within 1e-8 (worst {worst:.2e})", case.name),
        );
        ok &= check(
            &mut clauses,
            outcome.solve.density.values().iter().all(|v| *v >= 0.0),
            &format!("{}: density nonnegative", case.name),
        );
        let upper = outcome.solve.density.partition().interval().upper();
        let cdf_end = outcome.solve.density.cdf(upper).unwrap();
        ok &= check(
            &mut clauses,
            (cdf_end - 1.0).abs() <= 1e-8,
            &format!("{}: cdf ends at 1 within 1e-8 ({cdf_end:.12})", case.name),
        );
    }
    report("criterion 7 (moment fidelity)", clauses, ok);
}

#[test]
fn criterion_8_cross_solver_agreement() {
    let mut clauses = Vec::new();
    let mut ok = true;

    // the two routes must agree on the mean preset at n = 200
    let iv = Interval::new(0.0, 0.1).unwrap();
    let partition = Partition::new(iv, 200).unwrap();
    let spec = MomentSpec::new(&iv, vec![1.0, 0.04]).unwrap();
    let direct = solve_spd(
        &SpdProblem::new(partition.clone(), spec.clone()).unwrap(),
        &SolverConfig::default(),
    )
    .unwrap();
    let init = initial_multipliers(1, &partition);
    let (lambda, fit_diag) =
        fit_multipliers(&spec, &partition, &init, &SolverConfig::default()).unwrap();
    ok &= check(&mut clauses, fit_diag.converged, "multiplier fit converged");
    let induced = induced_density(&lambda, &partition).unwrap();
    let sup = induced
        .values()
        .iter()
        .zip(direct.density.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    ok &= check(
        &mut clauses,
        sup <= 1e-2,
        &format!("routes agree within 1e-2 sup-norm (measured {sup:.3e})"),
    );

    // on the other presets the multiplier route may fail, but its status
    // must be reported truthfully in the comparison row
    for case in [presets::bell_case(), presets::bowl_case()] {
        let lambda_opts = RunOptions {
            solver: SolverChoice::Lambda,
            trials: 0,
            ..RunOptions::default()
        };
        match run_case(&case, &lambda_opts) {
            Ok(outcome) => {
                let truthful = outcome.row.spd_converged == outcome.solve.diagnostics.converged;
                ok &= check(
                    &mut clauses,
                    truthful,
                    &format!(
                        "{}: lambda route status reported truthfully (converged = {})",
                        case.name, outcome.row.spd_converged
                    ),
                );
            }
            Err(e) => {
                // a hard error is also an acceptable, visible outcome
                ok &= check(
                    &mut clauses,
                    true,
                    &format!("{}: lambda route failed loudly ({e})", case.name),
                );
            }
        }
    }
    report("criterion 8 (cross-solver agreement)", clauses, ok);
}

#[test]
fn criterion_9_bound_sweep_trends() {
    let mut clauses = Vec::new();
    let mut ok = true;
    for case in [presets::texp_sweep(), presets::bell_sweep()] {
        let sweep = run_bound_sweep(&case, &opts_no_trials()).unwrap();
        assert!(sweep.errors.is_empty(), "{:?}", sweep.errors);
        let peaks: Vec<f64> = sweep.outcomes.iter().map(|o| o.row.peak_density).collect();
        let lengths: Vec<f64> = sweep
            .outcomes
            .iter()
            .map(|o| o.row.spd_path_length)
            .collect();
        ok &= check(
            &mut clauses,
            peaks.windows(2).all(|w| w[0] < w[1]),
            &format!("{}: peaks strictly increase {peaks:.4?}", case.name),
        );
        ok &= check(
            &mut clauses,
            lengths.windows(2).all(|w| w[0] < w[1]),
            &format!(
                "{}: path lengths strictly increase {lengths:.6?}",
                case.name
            ),
        );
    }
    report("criterion 9 (bound sweeps)", clauses, ok);
}

#[test]
fn criterion_10_numerical_hygiene() {
    let mut clauses = Vec::new();
    let mut ok = true;

    // analytic objective gradient vs central finite differences at 20
    // random feasible points (mixed toward the uniform so every cell is
    // strictly interior and two-sided differences stay valid)
    let iv = Interval::new(0.0, 0.1).unwrap();
    let partition = Partition::new(iv, 400).unwrap();
    let spec = MomentSpec::new(&iv, vec![1.0, 0.04]).unwrap();
    let delta = partition.cell_width();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_rel = 0.0f64;
    for _ in 0..20 {
        let sampled = sample_feasible_density(&partition, &spec, &mut rng).unwrap();
        let uniform = 1.0 / iv.width();
        let point: Vec<f64> = sampled
            .values()
            .iter()
            .map(|v| 0.3 * v + 0.7 * uniform)
            .collect();
        let length_of = |values: &[f64]| {
            PiecewiseDensity::new(partition.clone(), values.to_vec())
                .unwrap()
                .path_length()
        };
        for i in (0..400).step_by(37) {
            let analytic = delta * point[i] / (1.0 + point[i] * point[i]).sqrt();
            let h = 6.055454452393343e-6 * (1.0 + point[i].abs());
            let mut plus = point.clone();
            plus[i] += h;
            let mut minus = point.clone();
            minus[i] -= h;
            let fd = (length_of(&plus) - length_of(&minus)) / (2.0 * h);
            worst_rel = worst_rel.max((analytic - fd).abs() / analytic.abs().max(1e-12));
        }
    }
    ok &= check(
        &mut clauses,
        worst_rel <= 1e-6,
        &format!("analytic gradient matches central differences (worst rel {worst_rel:.2e})"),
    );

    // grid refinement: the optimal path length sequence is Cauchy with
    // gaps shrinking at least 2x per doubling
    let reports = refine_solve(iv, &spec, &[50, 100, 200, 400], &SolverConfig::default()).unwrap();
    let lengths: Vec<f64> = reports.iter().map(|r| r.path_length).collect();
    let gaps: Vec<f64> = lengths.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let gaps_text: Vec<String> = gaps.iter().map(|g| format!("{g:.3e}")).collect();
    ok &= check(
        &mut clauses,
        gaps[1] <= gaps[0] / 2.0 && gaps[2] <= gaps[1] / 2.0,
        &format!(
            "refinement gaps shrink >= 2x per doubling ({})",
            gaps_text.join(", ")
        ),
    );
    report("criterion 10 (numerical hygiene)", clauses, ok);
}
