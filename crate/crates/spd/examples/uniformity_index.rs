//! Core functionals on piecewise densities: raw moments, the CDF, its arc
//! length, and the uniformity index.
//!
//!     cargo run --example uniformity_index

use spd::{Interval, Partition, PiecewiseDensity};

fn main() -> spd::Result<()> {
    let interval = Interval::new(0.0, 1.0)?;
    let partition = Partition::new(interval, 1000)?;

    // the uniform density: the shortest possible CDF path, uniformity 1
    let uniform = PiecewiseDensity::uniform(partition.clone());
    println!(
        "uniform on [0,1]:  mass {:.6}  mean {:.6}  path length {:.9}  uniformity {:.9}",
        uniform.raw_moment(0),
        uniform.raw_moment(1),
        uniform.path_length(),
        uniform.uniformity_index()
    );

    // a triangular ramp
    let ramp: Vec<f64> = partition.midpoints().iter().map(|x| 2.0 * x).collect();
    let ramp = PiecewiseDensity::new(partition.clone(), ramp)?;
    println!(
        "ramp 2x on [0,1]:  mass {:.6}  mean {:.6}  path length {:.9}  uniformity {:.9}",
        ramp.raw_moment(0),
        ramp.raw_moment(1),
        ramp.path_length(),
        ramp.uniformity_index()
    );

    // all mass in one cell: the uniformity index approaches its lower
    // bound 1/sqrt(2) as the spike narrows
    let mut spike = vec![0.0; partition.len()];
    spike[0] = partition.len() as f64;
    let spike = PiecewiseDensity::new(partition, spike)?;
    println!(
        "near-degenerate:   mass {:.6}  path length {:.9}  uniformity {:.9}  (bound {:.9})",
        spike.raw_moment(0),
        spike.path_length(),
        spike.uniformity_index(),
        std::f64::consts::FRAC_1_SQRT_2
    );

    // the CDF is available pointwise
    println!("\nCDF of the ramp:");
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("  F({x:.2}) = {:.6}", ramp.cdf(x)?);
    }

    Ok(())
}
