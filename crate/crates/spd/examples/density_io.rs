//! Density serialization: the CSV format (`cell,midpoint,density`, written
//! at 17 significant digits so values round-trip exactly) and the JSON
//! object `{a, b, n, values}`.
//!
//!     cargo run --example density_io

use spd::{Interval, Partition, PiecewiseDensity};

fn main() -> spd::Result<()> {
    let partition = Partition::new(Interval::new(0.0, 0.1)?, 5)?;
    let values: Vec<f64> = partition
        .midpoints()
        .iter()
        .map(|x| 20.0 - 150.0 * x)
        .collect();
    let density = PiecewiseDensity::new(partition, values)?;

    let csv = density.to_csv();
    println!("CSV form:\n{csv}");
    let from_csv = PiecewiseDensity::from_csv(&csv)?;
    assert_eq!(from_csv.values(), density.values());
    println!("CSV round trip: values identical bit for bit");

    let json = serde_json::to_string_pretty(&density).expect("serializes");
    println!("\nJSON form:\n{json}");
    let from_json: PiecewiseDensity = serde_json::from_str(&json).expect("parses");
    assert_eq!(from_json.values(), density.values());
    println!("\nJSON round trip: values identical bit for bit");
    Ok(())
}
