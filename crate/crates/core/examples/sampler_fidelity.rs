//! Chi-square of each sampler's count histogram against the exact law.
//!
//! cargo run --release --example sampler_fidelity

use erwhex::harness::{run_axis_marginal, run_sampler_fidelity, ExperimentConfig, SamplerKind};

fn main() -> erwhex::Result<()> {
    let config = ExperimentConfig::new(vec![0.0, 0.5, 1.0], vec![4], 100_000, 23);
    for c in run_sampler_fidelity(&config, &SamplerKind::ALL)? {
        println!(
            "{:<40} p={:?} chi2 = {:>8.2} (critical {:.2}) {}",
            c.name,
            c.p,
            c.statistic,
            c.threshold,
            if c.passed { "ok" } else { "REJECT" }
        );
    }
    let axis = ExperimentConfig::new(vec![0.3], vec![8], 100_000, 29);
    for c in run_axis_marginal(&axis)? {
        println!(
            "{:<40} p={:?} chi2 = {:>8.2} (critical {:.2})",
            c.name, c.p, c.statistic, c.threshold
        );
    }
    Ok(())
}
