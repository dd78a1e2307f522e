//! Axis shares of the urn along one long path and across replications.
//!
//! cargo run --release --example axis_equidistribution

use erwhex::harness::{run_claim2, ExperimentConfig};

fn main() -> erwhex::Result<()> {
    let config = ExperimentConfig::new(
        vec![0.0, 0.5, 0.9, 1.0],
        vec![1_000, 10_000, 100_000],
        2_000,
        3,
    );
    let report = run_claim2(&config)?;
    println!(
        "{:>4} {:>7} {:>10}  replication means",
        "p", "n", "max|C/n-1/3|"
    );
    for row in &report.rows {
        let means = row
            .replication_means
            .map(|m| format!("{:.4} {:.4} {:.4}", m[0], m[1], m[2]))
            .unwrap_or_default();
        println!(
            "{:>4} {:>7} {:>10.5}  {means}",
            row.p, row.n, row.path_deviation
        );
    }
    for c in &report.checks {
        println!(
            "{:<48} p={:?} {}",
            c.name,
            c.p,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
