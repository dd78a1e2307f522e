//! `|S_n|/n` shrinks like `n^{-1/2}` whatever the memory.
//!
//! cargo run --release --example lln_decay

use erwhex::harness::{run_lln, ExperimentConfig, SamplerKind};

fn main() -> erwhex::Result<()> {
    let config = ExperimentConfig::new(vec![0.0, 0.5, 1.0], vec![100, 1_000, 10_000], 2_000, 11);
    let report = run_lln(&config, SamplerKind::Counts)?;
    for row in &report.rows {
        println!(
            "p = {:<3} n = {:>6}: E|S_n|/n = {:.5} ± {:.5}   sqrt(n) E|S_n|/n = {:.4}",
            row.p,
            row.n,
            row.mean_abs_over_n,
            row.stderr_abs_over_n,
            row.mean_abs_over_n * (row.n as f64).sqrt()
        );
    }
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    println!("{} checks, {} failed", report.checks.len(), failed.len());
    Ok(())
}
