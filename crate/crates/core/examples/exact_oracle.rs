//! Exact law of the direction counts by dynamic programming.
//!
//! cargo run --release --example exact_oracle

use erwhex::oracle::{exact_count_distribution, exact_count_distribution_rational, exact_moments};

fn main() -> erwhex::Result<()> {
    // Full memory: the second step copies or reverses the first.
    let exact = exact_count_distribution_rational(2, 1.0)?;
    println!("n = 2, p = 1: {} count vectors", exact.len());
    for (c, prob) in &exact {
        println!("  {:?}  {prob}", c.as_array());
    }

    let n = 12;
    for p in [0.0, 0.5, 0.9, 1.0] {
        let dist = exact_count_distribution(n, p)?;
        let m = exact_moments(n, p)?;
        println!(
            "n = {n}, p = {p}: {:>5} states, mass {:.15}, E|S|^2 = {:.12}, Var x = {:.12}, Cov = {:+.1e}",
            dist.state_count(),
            dist.total_mass(),
            m.second_moment_radius,
            m.component_variances.0,
            m.component_covariance
        );
    }
    Ok(())
}
