//! Sign-process tests on a long walk, and the same tests on a sampler whose
//! signs lean towards `+`.
//!
//! cargo run --release --example sign_independence

use erwhex::harness::{
    run_claim1, BiasedSignSource, ExperimentConfig, HistorySource, TrajectorySource,
};

fn main() -> erwhex::Result<()> {
    let config = ExperimentConfig::new(vec![0.5, 0.9], vec![100_000], 1, 1);
    let biased = BiasedSignSource { bias: 0.05 };
    for source in [&HistorySource as &dyn TrajectorySource, &biased] {
        let report = run_claim1(&config, source)?;
        println!("source: {}", report.source);
        for row in &report.rows {
            println!(
                "  p = {}: plus fraction {:.4}, acf {:?}, chi2(sign, axis) = {:.2}",
                row.p,
                row.plus_fraction,
                row.autocorrelations.map(|a| (a * 1e4).round() / 1e4),
                row.sign_axis_chi_square
            );
        }
        for c in report.checks.iter().filter(|c| !c.passed) {
            println!(
                "  rejected: {} at p = {:?} ({:.4} vs {:.4})",
                c.name, c.p, c.statistic, c.threshold
            );
        }
    }
    Ok(())
}
