//! One walk from each sampler, plus the step law it was drawn from.
//!
//! cargo run --release --example simulate_walk -- 0.7 20

use erwhex::lattice::position_from_counts;
use erwhex::rng::stream_rng;
use erwhex::urn::simulate_decomposed_walk;
use erwhex::walk::{simulate_counts, simulate_history, step_distribution};
use erwhex::{CountVector6, WalkParams};

fn main() -> erwhex::Result<()> {
    let mut args = std::env::args().skip(1);
    let p: f64 = args.next().map_or(0.7, |s| s.parse().expect("p"));
    let n: u64 = args.next().map_or(20, |s| s.parse().expect("n"));
    let params = WalkParams::new(p, n, 42)?;

    let walk = simulate_history(&params)?;
    println!("history sampler, p = {p}, n = {n}");
    for (i, (d, s)) in walk.steps().iter().zip(walk.positions()).enumerate() {
        let (x, y) = s.to_cartesian();
        println!(
            "{:>4}  zeta^{}  (u, v) = ({:>3}, {:>3})  (x, y) = ({x:>7.3}, {y:>7.3})",
            i + 1,
            d.index(),
            s.u,
            s.v
        );
    }
    let c = walk.counts();
    println!(
        "counts {:?}, |S|^2 = {}",
        c.as_array(),
        walk.final_position().norm_squared()
    );

    let q = step_distribution(&c, p)?;
    println!(
        "law of step {}: {:?}",
        n + 1,
        q.map(|x| (x * 1e4).round() / 1e4)
    );

    // The other two samplers target the same law with their own streams.
    let counts = simulate_counts(&params)?;
    let decomposed = simulate_decomposed_walk(&params)?;
    println!(
        "counts sampler endpoint:     {:?}",
        position_from_counts(&counts)
    );
    println!(
        "decomposed sampler endpoint: {:?}",
        decomposed.final_position()
    );

    // Mean squared distance over a few thousand counts-sampler runs.
    let reps = 4000;
    let mean_r2: f64 = (0..reps)
        .map(|r| {
            let c: CountVector6 =
                erwhex::walk::simulate_counts_with(p, n, &mut stream_rng(7, r)).unwrap();
            position_from_counts(&c).norm_squared() as f64
        })
        .sum::<f64>()
        / reps as f64;
    println!("E|S_n|^2 over {reps} runs: {mean_r2:.2} (exact value {n})");
    Ok(())
}
