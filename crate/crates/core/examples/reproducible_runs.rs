//! File outputs and manifests: the same command twice gives the same bytes,
//! and the manifest's command line reruns it.
//!
//! cargo run --release --example reproducible_runs

use clap::Parser;
use erwhex::cli::{cmd_simulate, rerun_argv, Cli, Command, SimulateArgs};
use erwhex::harness::SamplerKind;

fn main() -> erwhex::Result<()> {
    let dir = std::env::temp_dir().join(format!("erwhex-example-{}", std::process::id()));
    let args = SimulateArgs {
        p: 0.5,
        n: 1_000,
        reps: 100,
        seed: 7,
        mode: SamplerKind::Counts,
        trajectories: false,
        out: dir.join("first"),
    };
    let first = cmd_simulate(&args)?.manifest;

    let argv = rerun_argv(&first, &dir.join("second")).expect("recorded command line");
    println!("rerun: {:?}", argv);
    let Command::Simulate(again) = Cli::parse_from(argv).command else {
        unreachable!("simulate manifest");
    };
    let second = cmd_simulate(&again)?.manifest;

    println!("first  {}", first.reproducibility_hash);
    println!("second {}", second.reproducibility_hash);
    assert_eq!(first.reproducibility_hash, second.reproducibility_hash);
    let text = std::fs::read_to_string(dir.join("first/positions.csv")).expect("positions");
    for line in text.lines().take(4) {
        println!("{line}");
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}
