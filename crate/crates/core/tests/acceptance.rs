//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1-3 are recomputed here from first principles; 4-8 read the
//! checks of a default `verify` run; 9 reruns `verify` through the binary
//! with a different thread count and compares every output byte.
//!
//! Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use erwhex::cli::{cmd_verify, read_outputs, VerifyArgs};
use erwhex::harness::{BatteryReport, Check};
use erwhex::lattice::position_from_counts;
use erwhex::oracle::{compositions, exact_count_levels, CountDistribution};
use erwhex::report::MANIFEST_FILE;
use erwhex::walk::step_distribution;
use erwhex::CountVector6;

const P_KERNEL: [f64; 3] = [0.0, 0.3, 1.0];
const P_ORACLE: [f64; 5] = [0.0, 0.3, 0.5, 0.9, 1.0];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

/// Walks every outcome of the next step over an explicit history with the
/// given counts: `T` uniform, then copy / reverse / fresh uniform direction.
fn enumerate_next_step(c: &CountVector6, p: f64) -> [f64; 6] {
    let history: Vec<usize> = (0..6)
        .flat_map(|d| std::iter::repeat_n(d, c[d] as usize))
        .collect();
    let mut law = [0.0; 6];
    if history.is_empty() {
        for x in &mut law {
            *x = 1.0 / 6.0;
        }
        return law;
    }
    let w = 1.0 / history.len() as f64;
    for &d in &history {
        law[d] += w * p / 2.0;
        law[(d + 3) % 6] += w * p / 2.0;
        for x in &mut law {
            *x += w * (1.0 - p) / 6.0;
        }
    }
    law
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut vectors = 0;
    for total in 0..=4 {
        for c in compositions::<6>(total) {
            vectors += 1;
            for p in P_KERNEL {
                let got = step_distribution(&c, p).expect("valid p");
                let want = enumerate_next_step(&c, p);
                for d in 0..6 {
                    worst = worst.max((got[d] - want[d]).abs());
                }
            }
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!(
            "{vectors} count vectors x {} p values, max |diff| = {worst:.2e} (tol 1e-12)",
            P_KERNEL.len()
        ),
    )
}

/// Pull form of one step: `P_{n+1}(c) = sum_d P_n(c - e_d) q_d(c - e_d)`.
fn pull(prev: &BTreeMap<CountVector6, f64>, c: &CountVector6, p: f64) -> f64 {
    (0..6)
        .filter_map(|d| {
            let before = c.decremented(d)?;
            let mass = prev.get(&before)?;
            Some(mass * step_distribution(&before, p).expect("valid p")[d])
        })
        .sum()
}

fn criterion_2() -> Outcome {
    let (mut worst_ck, mut worst_mass) = (0.0f64, 0.0f64);
    for p in P_ORACLE {
        let mut prev: Option<BTreeMap<CountVector6, f64>> = None;
        exact_count_levels(20, p, 20, |level: &CountDistribution| {
            let now: BTreeMap<CountVector6, f64> = level.iter().map(|(c, m)| (*c, m)).collect();
            worst_mass = worst_mass.max((now.values().sum::<f64>() - 1.0).abs());
            if let Some(prev) = &prev {
                for c in compositions::<6>(level.n()) {
                    let want = pull(prev, &c, p);
                    let got = now.get(&c).copied().unwrap_or(0.0);
                    worst_ck = worst_ck.max((got - want).abs());
                }
            }
            prev = Some(now);
        })
        .expect("oracle");
    }
    Outcome::new(
        worst_ck <= 1e-12 && worst_mass <= 1e-10,
        format!("levels 1..20, 5 p values: max CK diff {worst_ck:.2e}, max |mass - 1| {worst_mass:.2e} (tol 1e-10)"),
    )
}

fn criterion_3() -> Outcome {
    let (mut mean_err, mut r2_err, mut var_err, mut cov_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for p in P_ORACLE {
        exact_count_levels(20, p, 20, |level: &CountDistribution| {
            let n = level.n() as f64;
            let (mut mx, mut my, mut xx, mut yy, mut xy, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
            for (c, m) in level.iter() {
                let s = position_from_counts(c);
                let (x, y) = s.to_cartesian();
                mx += m * x;
                my += m * y;
                xx += m * x * x;
                yy += m * y * y;
                xy += m * x * y;
                r2 += m * s.norm_squared() as f64;
            }
            mean_err = mean_err.max(mx.abs()).max(my.abs());
            r2_err = r2_err.max((r2 - n).abs());
            var_err = var_err
                .max((xx - mx * mx - n / 2.0).abs())
                .max((yy - my * my - n / 2.0).abs());
            cov_err = cov_err.max((xy - mx * my).abs());
        })
        .expect("oracle");
    }
    Outcome::new(
        mean_err <= 1e-10 && r2_err <= 1e-9 && var_err <= 1e-9 && cov_err <= 1e-9,
        format!(
            "n <= 20, 5 p values: |E S| {mean_err:.1e}, |E|S|^2 - n| {r2_err:.1e}, |Var - n/2| {var_err:.1e}, |Cov| {cov_err:.1e}"
        ),
    )
}

fn suite_outcome(report: &BatteryReport, suite: &str) -> Outcome {
    let checks: Vec<&Check> = report.checks.iter().filter(|c| c.suite == suite).collect();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            let p = c.p.map(|p| format!(" p={p}")).unwrap_or_default();
            format!("{}{p} ({:.3e} vs {:.3e})", c.name, c.statistic, c.threshold)
        })
        .collect();
    let mut detail = format!("{} checks, {} failed", checks.len(), failed.len());
    if !failed.is_empty() {
        detail.push_str(": ");
        detail.push_str(&failed.join("; "));
    }
    Outcome::new(!checks.is_empty() && failed.is_empty(), detail)
}

fn criterion_9(first: &Path, second: &Path) -> Outcome {
    let status = Command::new(env!("CARGO_BIN_EXE_erwhex"))
        .args(["--threads", "3", "verify", "--out"])
        .arg(second)
        .status()
        .expect("run erwhex verify");
    let a = read_outputs(first).expect("first outputs");
    let b = read_outputs(second).expect("second outputs");
    let names = |m: &BTreeMap<String, Vec<u8>>| {
        m.keys()
            .filter(|k| *k != MANIFEST_FILE)
            .cloned()
            .collect::<Vec<_>>()
    };
    let same_files = names(&a) == names(&b);
    let differing: Vec<String> = names(&a)
        .into_iter()
        .filter(|k| a.get(k) != b.get(k))
        .collect();
    let hash = |m: &BTreeMap<String, Vec<u8>>| -> String {
        let v: serde_json::Value =
            serde_json::from_slice(&m[MANIFEST_FILE]).expect("manifest json");
        v["reproducibility_hash"]
            .as_str()
            .unwrap_or_default()
            .to_string()
    };
    let same_hash = hash(&a) == hash(&b);
    Outcome::new(
        status.code().is_some() && same_files && differing.is_empty() && same_hash,
        format!(
            "{} files compared (default threads vs --threads 3), differing: {:?}, manifest hashes equal: {same_hash}",
            names(&a).len(),
            differing
        ),
    )
}

fn line(k: u32, name: &str, o: &Outcome) {
    println!(
        "criterion {k} {}: {name}: {}",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail
    );
}

fn main() {
    let independent = [criterion_1(), criterion_2(), criterion_3()];

    let dir = tempfile::tempdir().expect("tempdir");
    let first = dir.path().join("threads-default");
    let (report, outcome) = cmd_verify(&VerifyArgs::new(&first), |suite, secs, checks| {
        eprintln!("  [{suite}: {} checks, {secs:.1}s]", checks.len());
    })
    .expect("verify");

    let criteria = [
        (1, "kernel", "kernel brute-force equivalence"),
        (2, "oracle", "oracle Chapman-Kolmogorov and mass"),
        (3, "moments", "exact moment identities"),
        (4, "fidelity", "sampler fidelity vs oracle (n=6, 1e6 reps)"),
        (5, "claim1", "sign independence (n=1e5)"),
        (6, "claim2", "axis equidistribution"),
        (7, "lln", "LLN decay"),
        (8, "clt", "CLT at n=1e4, 1e5 reps"),
    ];
    let mut failed = Vec::new();
    for (k, suite, name) in criteria {
        let mut o = suite_outcome(&report, suite);
        if let Some(own) = independent.get(k as usize - 1) {
            o = Outcome::new(
                o.passed && own.passed,
                format!("{}; verify suite: {}", own.detail, o.detail),
            );
        }
        line(k, name, &o);
        if !o.passed {
            failed.push(k);
        }
    }
    let t = &report.tally;
    println!(
        "verify tally: {} checks, {} hypothesis tests, {} statistical rejections (expected {:.3}), {} deterministic failures, exit code {}",
        t.checks,
        t.hypothesis_tests,
        t.statistical_rejections,
        t.expected_false_positives,
        t.deterministic_failures,
        outcome.exit_code()
    );

    let o = criterion_9(&first, &dir.path().join("threads-3"));
    line(9, "determinism across thread counts", &o);
    if !o.passed {
        failed.push(9);
    }

    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
