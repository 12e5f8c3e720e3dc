//! The moment-matched maximum-entropy baselines: rate inversion for the
//! truncated exponential, shape inversion for the scaled Beta, and CDF path
//! lengths by adaptive quadrature (with the square-root substitution for the
//! Beta(0.5, 0.5) edge spikes).
//!
//!     cargo run --example reference_baselines

use spd::reference::ReferenceDistribution;
use spd::Interval;

fn main() -> spd::Result<()> {
    let texp = ReferenceDistribution::match_truncated_exponential(Interval::new(0.0, 0.1)?, 0.04)?;
    println!(
        "truncated exponential, mean 0.04 on [0, 0.1]: {:?}\n  mean check {:.12}, path length {:.9}",
        texp.kind(),
        texp.mean(),
        texp.path_length()?
    );

    let symmetric = Interval::new(-0.1, 0.1)?;
    for (name, var) in [("bell", 0.001), ("bowl", 0.005)] {
        let beta = ReferenceDistribution::match_scaled_beta(symmetric, 0.0, var)?;
        println!(
            "{name}: {:?}\n  variance check {:.12}, path length {:.9}",
            beta.kind(),
            beta.variance().unwrap(),
            beta.path_length()?
        );
    }

    // the uniform is the straight line
    let uniform = ReferenceDistribution::uniform(Interval::new(0.0, 0.1)?);
    println!(
        "uniform on [0, 0.1]: path length {:.9} (straight line {:.9})",
        uniform.path_length()?,
        1.01f64.sqrt()
    );

    // the normal is for shape overlays only; its path length diverges
    let normal = ReferenceDistribution::normal(0.0, 0.001)?;
    println!(
        "normal(0, 0.001): density at 0 is {:.4}; path_length() -> {:?}",
        normal.density_at(0.0),
        normal.path_length().unwrap_err().to_string()
    );

    println!(
        "\nserialized: {}",
        serde_json::to_string(&texp).expect("serializes")
    );
    Ok(())
}
