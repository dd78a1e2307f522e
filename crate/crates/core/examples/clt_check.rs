//! Gaussian limit of `S_n/sqrt(n)`: variances, KS tests and the comparison
//! across memory values.
//!
//! cargo run --release --example clt_check

use erwhex::harness::{run_clt, ExperimentConfig, SamplerKind};

fn main() -> erwhex::Result<()> {
    let config = ExperimentConfig::new(vec![0.0, 0.5, 0.9], vec![2_000], 10_000, 17);
    let report = run_clt(&config, SamplerKind::Counts)?;
    for r in &report.rows {
        println!(
            "p = {}: var ({:.4}, {:.4}) cov {:+.4}  KS ({:.4}, {:.4}) vs {:.4}",
            r.p, r.var_x, r.var_y, r.cov_xy, r.ks_x, r.ks_y, r.ks_critical
        );
    }
    for (pa, pb, _, dx, dy, crit) in &report.cross_p {
        println!("two-sample p = {pa} vs {pb}: D = ({dx:.4}, {dy:.4}), critical {crit:.4}");
    }
    // Coarse text histogram of x / sigma for the first p.
    let (p, n, bins) = &report.histograms[0];
    println!("x-component histogram, p = {p}, n = {n}");
    let max = bins.iter().map(|b| b.count).max().unwrap_or(1).max(1);
    for chunk in bins.chunks(4) {
        let count: u64 = chunk.iter().map(|b| b.count).sum();
        let bar = "#".repeat((count * 60 / (4 * max)) as usize);
        println!("{:>5.1} {bar}", chunk[0].bin_left);
    }
    Ok(())
}
