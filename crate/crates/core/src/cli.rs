//! The `erwhex` commands.
//!
//! Every command writes its tables plus a `manifest.json` into `--out`.
//! The manifest records the exact command line, so rerunning it reproduces
//! every output byte for byte.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{
    replicate, run_battery, run_clt, run_lln, BatteryConfig, BatteryReport, Check,
    ExperimentConfig, SamplerKind, Tally, DEFAULT_SIGNIFICANCE,
};
use crate::lattice::{position_from_counts, Axis};
use crate::oracle::{
    exact_count_distribution_capped, exact_count_distribution_rational, OracleMode, DEFAULT_CAP,
    RATIONAL_CAP,
};
use crate::report::{self, fmt_f64, fmt_param, Csv, RunManifest};
use crate::rng::stream_rng;
use crate::urn::{
    decompose_trajectory, mean_replacement_matrix, reconstruct_position,
    simulate_decomposed_walk_with, simulate_urn_counts_with,
};
use crate::walk::{simulate_history_with, simulate_kernel_trajectory_with, Trajectory};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_STATISTICAL_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest horizon for which `simulate --trajectories` dumps every step.
pub const TRAJECTORY_CAP: u64 = 10_000;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "erwhex",
    version,
    about = "Directional elephant random walk on the triangular lattice"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo replication (default: all cores).
    #[arg(long, global = true, env = "ERWHEX_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate replications and write final positions.
    Simulate(SimulateArgs),
    /// Exact law of the direction counts.
    Oracle(OracleArgs),
    /// Split one trajectory into signs, axes and stopping times.
    Decompose(DecomposeArgs),
    /// One path of the axis urn.
    Urn(UrnArgs),
    /// Run the full verification battery.
    Verify(VerifyArgs),
    /// LLN and CLT tables over a grid of p and n.
    Sweep(SweepArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "counts")]
    pub mode: SamplerKind,
    /// Also write every step of every replication (n ≤ 10⁴ only).
    #[arg(long)]
    pub trajectories: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    /// Exact rational arithmetic (n ≤ 10).
    #[arg(long)]
    pub rational: bool,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "history")]
    pub mode: SamplerKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize)]
pub struct UrnArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write every `stride`-th step (the last step is always written).
    #[arg(long, default_value_t = 1)]
    pub stride: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize)]
pub struct VerifyArgs {
    /// Flat `key = value` config file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replace the p values of every suite (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub significance: Option<f64>,
    /// Replace the sign sampler with one whose signs are `+` with extra
    /// probability `bias` (negative control).
    #[arg(long, hide = true)]
    pub negative_control: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub significance: Option<f64>,
    #[arg(long, default_value = "counts")]
    pub mode: SamplerKind,
    #[arg(long)]
    pub out: PathBuf,
}

/// Values read from a flat `key = value` file. Keys are the fields of
/// [`ExperimentConfig`]; lists are comma separated; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub p_grid: Option<Vec<f64>>,
    pub n_grid: Option<Vec<u64>>,
    pub replications: Option<u64>,
    pub base_seed: Option<u64>,
    pub significance: Option<f64>,
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ConfigFile::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "p_grid" => cfg.p_grid = Some(parse_list(key, value)?),
                "n_grid" => cfg.n_grid = Some(parse_list(key, value)?),
                "replications" => cfg.replications = Some(parse_one(key, value)?),
                "base_seed" => cfg.base_seed = Some(parse_one(key, value)?),
                "significance" => cfg.significance = Some(parse_one(key, value)?),
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(ConfigFile::default()), Self::load)
    }
}

/// What a command produced.
#[derive(Debug)]
pub struct CommandOutcome {
    pub manifest: RunManifest,
    /// Present for commands that run checks (`verify`, `sweep`).
    pub tally: Option<Tally>,
}

impl CommandOutcome {
    pub fn exit_code(&self) -> i32 {
        match &self.tally {
            Some(t) if !t.passed => EXIT_STATISTICAL_FAILURE,
            _ => EXIT_PASS,
        }
    }
}

fn finish(
    command: &str,
    parameters: serde_json::Value,
    command_line: Vec<String>,
    seed: u64,
    dir: &Path,
    files: &[PathBuf],
) -> Result<RunManifest> {
    let mut params = parameters;
    if let serde_json::Value::Object(map) = &mut params {
        map.remove("out");
        map.insert("command_line".into(), command_line.into());
    }
    let manifest = RunManifest::build(command, params, seed, dir, files)?;
    manifest.write(dir)?;
    Ok(manifest)
}

fn position_row(rep: u64, c: &crate::CountVector6) -> Vec<String> {
    let s = position_from_counts(c);
    let (x, y) = s.to_cartesian();
    vec![
        rep.to_string(),
        s.u.to_string(),
        s.v.to_string(),
        fmt_f64(x),
        fmt_f64(y),
    ]
}

fn sample_trajectory(
    mode: SamplerKind,
    p: f64,
    n: u64,
    rng: &mut crate::rng::StreamRng,
) -> Result<Trajectory> {
    match mode {
        SamplerKind::History => simulate_history_with(p, n, rng),
        SamplerKind::Counts => simulate_kernel_trajectory_with(p, n, rng),
        SamplerKind::Decomposed => simulate_decomposed_walk_with(p, n, rng),
    }
}

impl SimulateArgs {
    pub fn command_line(&self) -> Vec<String> {
        let mut v = vec![
            "simulate".to_string(),
            format!("--p={}", self.p),
            format!("--n={}", self.n),
            format!("--reps={}", self.reps),
            format!("--seed={}", self.seed),
            format!("--mode={}", self.mode),
        ];
        if self.trajectories {
            v.push("--trajectories".into());
        }
        v
    }
}

/// Writes `positions.csv` (rep, u, v, x, y) and, with `--trajectories`,
/// `trajectories.csv` (rep, step, direction_k, u, v). Replication `r` runs
/// on stream `r` of `--seed` whatever the mode, and the trajectory dump
/// reproduces the same final positions.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<CommandOutcome> {
    crate::walk::WalkParams::new(args.p, args.n, args.seed)?;
    if args.reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    if args.trajectories && args.n > TRAJECTORY_CAP {
        return Err(Error::HorizonTooLarge {
            n: args.n,
            cap: TRAJECTORY_CAP,
        });
    }
    report::ensure_dir(&args.out)?;
    let (p, n, mode) = (args.p, args.n, args.mode);
    let mut files = Vec::new();
    let mut positions = Csv::new(&["rep", "u", "v", "x", "y"]);
    if args.trajectories {
        let paths = replicate(args.reps, args.seed, |rng| {
            sample_trajectory(mode, p, n, rng)
        });
        let mut steps = Csv::new(&["rep", "step", "direction_k", "u", "v"]);
        for (rep, t) in paths.into_iter().enumerate() {
            let t = t?;
            for (i, (d, s)) in t.steps().iter().zip(t.positions()).enumerate() {
                steps.row(&[
                    rep.to_string(),
                    (i + 1).to_string(),
                    d.index().to_string(),
                    s.u.to_string(),
                    s.v.to_string(),
                ]);
            }
            positions.row(&position_row(rep as u64, &t.counts()));
        }
        let path = args.out.join("trajectories.csv");
        steps.write(&path)?;
        files.push(path);
    } else {
        let finals = replicate(args.reps, args.seed, |rng| mode.final_counts(p, n, rng));
        for (rep, c) in finals.into_iter().enumerate() {
            positions.row(&position_row(rep as u64, &c?));
        }
    }
    let path = args.out.join("positions.csv");
    positions.write(&path)?;
    files.insert(0, path);
    let manifest = finish(
        "simulate",
        serde_json::to_value(args)?,
        args.command_line(),
        args.seed,
        &args.out,
        &files,
    )?;
    Ok(CommandOutcome {
        manifest,
        tally: None,
    })
}

impl OracleArgs {
    pub fn command_line(&self) -> Vec<String> {
        let mut v = vec![
            "oracle".to_string(),
            format!("--p={}", self.p),
            format!("--n={}", self.n),
            format!("--cap={}", self.cap),
        ];
        if self.rational {
            v.push("--rational".into());
        }
        v
    }
}

/// Writes `oracle_distribution.csv` (c0..c5, probability, plus the exact
/// fraction in rational mode) and `oracle_moments.csv`.
pub fn cmd_oracle(args: &OracleArgs) -> Result<CommandOutcome> {
    let mode = if args.rational {
        OracleMode::Rational
    } else {
        OracleMode::Float
    };
    let (dist, exact) = if args.rational {
        if args.n > RATIONAL_CAP.min(args.cap) {
            return Err(Error::HorizonTooLarge {
                n: args.n,
                cap: RATIONAL_CAP.min(args.cap),
            });
        }
        let exact = exact_count_distribution_rational(args.n, args.p)?;
        let dist = crate::oracle::exact_count_distribution_rational_f64(args.n, args.p)?;
        (dist, Some(exact))
    } else {
        (
            exact_count_distribution_capped(args.n, args.p, args.cap)?,
            None,
        )
    };
    report::ensure_dir(&args.out)?;

    let mut header = vec!["c0", "c1", "c2", "c3", "c4", "c5", "probability"];
    if exact.is_some() {
        header.push("probability_exact");
    }
    let preamble = vec![format!(
        "n={},p={},mode={},states={}",
        args.n,
        fmt_param(args.p),
        mode,
        dist.state_count()
    )];
    let mut csv = Csv::new(&header).with_preamble(&preamble);
    for (c, prob) in dist.iter() {
        let mut row: Vec<String> = c.as_array().iter().map(|x| x.to_string()).collect();
        row.push(fmt_f64(prob));
        if let Some(exact) = &exact {
            row.push(exact[c].to_string());
        }
        csv.row(&row);
    }
    let dist_path = args.out.join("oracle_distribution.csv");
    csv.write(&dist_path)?;

    let m = dist.moments();
    let mut csv = Csv::new(&[
        "n",
        "p",
        "mean_x",
        "mean_y",
        "second_moment_radius",
        "var_x",
        "var_y",
        "cov_xy",
        "total_mass",
    ]);
    csv.row(&[
        args.n.to_string(),
        fmt_param(args.p),
        fmt_f64(m.mean.0),
        fmt_f64(m.mean.1),
        fmt_f64(m.second_moment_radius),
        fmt_f64(m.component_variances.0),
        fmt_f64(m.component_variances.1),
        fmt_f64(m.component_covariance),
        fmt_f64(dist.total_mass()),
    ]);
    let moments_path = args.out.join("oracle_moments.csv");
    csv.write(&moments_path)?;

    let manifest = finish(
        "oracle",
        serde_json::to_value(args)?,
        args.command_line(),
        0,
        &args.out,
        &[dist_path, moments_path],
    )?;
    Ok(CommandOutcome {
        manifest,
        tally: None,
    })
}

impl DecomposeArgs {
    pub fn command_line(&self) -> Vec<String> {
        vec![
            "decompose".to_string(),
            format!("--p={}", self.p),
            format!("--n={}", self.n),
            format!("--seed={}", self.seed),
            format!("--mode={}", self.mode),
        ]
    }
}

/// Writes `decomposition.csv` (step_index, direction_k, sign, axis) and
/// `stopping_times.csv` (axis, m, tau) for one trajectory on stream 0.
/// Fails if the position rebuilt from signs and stopping times differs from
/// the walk's own endpoint.
pub fn cmd_decompose(args: &DecomposeArgs) -> Result<CommandOutcome> {
    if args.n > TRAJECTORY_CAP * 100 {
        return Err(Error::HorizonTooLarge {
            n: args.n,
            cap: TRAJECTORY_CAP * 100,
        });
    }
    let t = sample_trajectory(args.mode, args.p, args.n, &mut stream_rng(args.seed, 0))?;
    let (signs, axes, times) = decompose_trajectory(&t);
    let rebuilt = reconstruct_position(&signs, &times);
    if rebuilt != t.final_position() {
        return Err(Error::Config(format!(
            "reconstruction mismatch: {rebuilt:?} vs {:?}",
            t.final_position()
        )));
    }
    report::ensure_dir(&args.out)?;

    let mut csv = Csv::new(&["step_index", "direction_k", "sign", "axis"]);
    for (i, ((d, s), a)) in t.steps().iter().zip(&signs.0).zip(&axes.0).enumerate() {
        csv.row(&[
            (i + 1).to_string(),
            d.index().to_string(),
            s.value().to_string(),
            a.exponent().to_string(),
        ]);
    }
    let decomposition = args.out.join("decomposition.csv");
    csv.write(&decomposition)?;

    let mut csv = Csv::new(&["axis", "m", "tau"]);
    for axis in Axis::ALL {
        for (m, tau) in times.for_axis(axis).iter().enumerate() {
            csv.row(&[
                axis.exponent().to_string(),
                (m + 1).to_string(),
                tau.to_string(),
            ]);
        }
    }
    let stopping = args.out.join("stopping_times.csv");
    csv.write(&stopping)?;

    let manifest = finish(
        "decompose",
        serde_json::to_value(args)?,
        args.command_line(),
        args.seed,
        &args.out,
        &[decomposition, stopping],
    )?;
    Ok(CommandOutcome {
        manifest,
        tally: None,
    })
}

impl UrnArgs {
    pub fn command_line(&self) -> Vec<String> {
        vec![
            "urn".to_string(),
            format!("--p={}", self.p),
            format!("--n={}", self.n),
            format!("--seed={}", self.seed),
            format!("--stride={}", self.stride),
        ]
    }
}

/// Writes `urn_path.csv` (n, C1, C2, C3) for one urn path on stream 0 and
/// `urn_matrix.csv` with the mean replacement matrix.
pub fn cmd_urn(args: &UrnArgs) -> Result<CommandOutcome> {
    if args.stride == 0 {
        return Err(Error::Config("stride must be at least 1".into()));
    }
    let path = simulate_urn_counts_with(args.n, args.p, &mut stream_rng(args.seed, 0))?;
    let matrix = mean_replacement_matrix(args.p)?;
    report::ensure_dir(&args.out)?;

    let mut csv = Csv::new(&["n", "C1", "C2", "C3"]);
    for (i, c) in path.iter().enumerate() {
        let step = i as u64 + 1;
        if step.is_multiple_of(args.stride) || step == args.n {
            csv.row(&[
                step.to_string(),
                c[0].to_string(),
                c[1].to_string(),
                c[2].to_string(),
            ]);
        }
    }
    let path_file = args.out.join("urn_path.csv");
    csv.write(&path_file)?;

    let mut csv = Csv::new(&["row", "col1", "col2", "col3"]);
    for (i, row) in matrix.0.iter().enumerate() {
        let mut fields = vec![(i + 1).to_string()];
        fields.extend(row.iter().map(|&x| fmt_f64(x)));
        csv.row(&fields);
    }
    let matrix_file = args.out.join("urn_matrix.csv");
    csv.write(&matrix_file)?;

    let manifest = finish(
        "urn",
        serde_json::to_value(args)?,
        args.command_line(),
        args.seed,
        &args.out,
        &[path_file, matrix_file],
    )?;
    Ok(CommandOutcome {
        manifest,
        tally: None,
    })
}

impl VerifyArgs {
    /// Plain verify writing to `out`.
    pub fn new(out: impl Into<PathBuf>) -> Self {
        VerifyArgs {
            config: None,
            p: None,
            seed: None,
            significance: None,
            negative_control: None,
            out: out.into(),
        }
    }

    /// Merges the config file and flags; flags win.
    pub fn battery_config(&self) -> Result<BatteryConfig> {
        let file = ConfigFile::load_opt(self.config.as_deref())?;
        if file.n_grid.is_some() || file.replications.is_some() {
            return Err(Error::Config(
                "verify uses fixed horizons and replication counts; only p_grid, base_seed and significance may be set"
                    .into(),
            ));
        }
        let defaults = BatteryConfig::default();
        let config = BatteryConfig {
            base_seed: self.seed.or(file.base_seed).unwrap_or(defaults.base_seed),
            significance: self
                .significance
                .or(file.significance)
                .unwrap_or(DEFAULT_SIGNIFICANCE),
            p_grid: self.p.clone().or(file.p_grid),
            negative_control: self.negative_control,
        };
        config.validate()?;
        Ok(config)
    }

    fn command_line(config: &BatteryConfig) -> Vec<String> {
        let mut v = vec![
            "verify".to_string(),
            format!("--seed={}", config.base_seed),
            format!("--significance={}", config.significance),
        ];
        if let Some(grid) = &config.p_grid {
            let list: Vec<String> = grid.iter().map(|p| p.to_string()).collect();
            v.push(format!("--p={}", list.join(",")));
        }
        if let Some(b) = config.negative_control {
            v.push(format!("--negative-control={b}"));
        }
        v
    }
}

/// Runs the battery and writes its tables, `summary.json` and the manifest.
/// `progress` receives each suite's name, wall time and checks.
pub fn cmd_verify(
    args: &VerifyArgs,
    progress: impl FnMut(&str, f64, &[Check]),
) -> Result<(BatteryReport, CommandOutcome)> {
    let config = args.battery_config()?;
    report::ensure_dir(&args.out)?;
    let report = run_battery(&config, progress)?;
    let files = report::write_battery(&report, &args.out)?;
    let manifest = finish(
        "verify",
        serde_json::to_value(&config)?,
        VerifyArgs::command_line(&config),
        config.base_seed,
        &args.out,
        &files,
    )?;
    let tally = report.tally.clone();
    Ok((
        report,
        CommandOutcome {
            manifest,
            tally: Some(tally),
        },
    ))
}

impl SweepArgs {
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let file = ConfigFile::load_opt(self.config.as_deref())?;
        let config = ExperimentConfig {
            p_grid: self
                .p
                .clone()
                .or(file.p_grid)
                .unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]),
            n_grid: self
                .n
                .clone()
                .or(file.n_grid)
                .unwrap_or_else(|| vec![100, 1_000]),
            replications: self.reps.or(file.replications).unwrap_or(1_000),
            base_seed: self.seed.or(file.base_seed).unwrap_or(DEFAULT_SEED),
            significance: self
                .significance
                .or(file.significance)
                .unwrap_or(DEFAULT_SIGNIFICANCE),
        };
        config.validate()?;
        Ok(config)
    }

    fn command_line(config: &ExperimentConfig, mode: SamplerKind) -> Vec<String> {
        let ps: Vec<String> = config.p_grid.iter().map(|p| p.to_string()).collect();
        let ns: Vec<String> = config.n_grid.iter().map(|n| n.to_string()).collect();
        vec![
            "sweep".to_string(),
            format!("--p={}", ps.join(",")),
            format!("--n={}", ns.join(",")),
            format!("--reps={}", config.replications),
            format!("--seed={}", config.base_seed),
            format!("--significance={}", config.significance),
            format!("--mode={mode}"),
        ]
    }
}

/// LLN and CLT tables over `p_grid × n_grid` with any sampler. Writes
/// `lln.csv`, `clt.csv`, `clt_cross_p.csv`, histograms and `checks.csv`.
pub fn cmd_sweep(args: &SweepArgs) -> Result<CommandOutcome> {
    let config = args.experiment_config()?;
    report::ensure_dir(&args.out)?;
    let lln = run_lln(&config, args.mode)?;
    let clt = run_clt(&config, args.mode)?;
    let mut files = Vec::new();
    let path = args.out.join("lln.csv");
    report::lln_csv(&lln).write(&path)?;
    files.push(path);
    files.extend(report::write_clt(&clt, &args.out, "")?);
    let checks: Vec<Check> = lln.checks.into_iter().chain(clt.checks).collect();
    let path = args.out.join("checks.csv");
    report::checks_csv(&checks).write(&path)?;
    files.push(path);

    let mut params = serde_json::to_value(&config)?;
    if let serde_json::Value::Object(map) = &mut params {
        map.insert("mode".into(), args.mode.name().into());
    }
    let manifest = finish(
        "sweep",
        params,
        SweepArgs::command_line(&config, args.mode),
        config.base_seed,
        &args.out,
        &files,
    )?;
    Ok(CommandOutcome {
        manifest,
        tally: Some(Tally::of(&checks)),
    })
}

/// Appends `--out` to a manifest's recorded command line, ready for
/// [`Cli::try_parse_from`].
pub fn rerun_argv(manifest: &RunManifest, out: &Path) -> Result<Vec<OsString>> {
    let recorded = manifest
        .parameters
        .get("command_line")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Config("manifest has no command line".into()))?;
    let mut argv: Vec<OsString> = vec!["erwhex".into()];
    for a in recorded {
        let a = a.as_str().ok_or_else(|| {
            Error::Config("manifest command line is not a list of strings".into())
        })?;
        argv.push(a.into());
    }
    argv.push("--out".into());
    argv.push(out.as_os_str().to_owned());
    Ok(argv)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("erwhex: cannot configure {threads} threads: {e}");
            return EXIT_USAGE;
        }
    }
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Urn(a) => cmd_urn(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a, |suite, seconds, checks| {
            let failed = checks.iter().filter(|c| !c.passed).count();
            eprintln!("{suite:>9}: {:>4} checks, {failed} failed, {seconds:.1}s", checks.len());
        })
        .map(|(report, outcome)| {
            let t = &report.tally;
            eprintln!(
                "tally: {} checks, {} statistical rejections (allowed {:.2}), {} deterministic failures",
                t.checks,
                t.statistical_rejections,
                2.0 * t.expected_false_positives,
                t.deterministic_failures
            );
            outcome
        }),
    };
    match result {
        Ok(outcome) => {
            let code = outcome.exit_code();
            println!(
                "{}: {}, {} files, reproducibility hash {}",
                outcome.manifest.command,
                if code == EXIT_PASS { "ok" } else { "FAILED" },
                outcome.manifest.outputs.len(),
                outcome.manifest.reproducibility_hash
            );
            code
        }
        Err(e) => {
            eprintln!("erwhex: {e}");
            e.exit_code()
        }
    }
}

/// Entry point for the binary: parses `args` and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            }
        }
    }
}

/// Files in `dir` keyed by name, for comparing two runs.
pub fn read_outputs(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            out.insert(entry.file_name().to_string_lossy().into_owned(), bytes);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_parsing() {
        let cfg = ConfigFile::parse(
            "# battery\np_grid = 0, 0.5,1\nn_grid=10,100 # trailing\nreplications = 50\nbase_seed=9\nsignificance = 0.01\n",
        )
        .unwrap();
        assert_eq!(cfg.p_grid, Some(vec![0.0, 0.5, 1.0]));
        assert_eq!(cfg.n_grid, Some(vec![10, 100]));
        assert_eq!(cfg.replications, Some(50));
        assert_eq!(cfg.base_seed, Some(9));
        assert_eq!(cfg.significance, Some(0.01));
        assert!(ConfigFile::parse("threads = 4").is_err());
        assert!(ConfigFile::parse("p_grid 0.5").is_err());
        assert!(ConfigFile::parse("replications = many").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("battery.cfg");
        fs::write(&cfg, "p_grid = 1\nbase_seed = 5\nsignificance = 0.01\n").unwrap();
        let mut args = VerifyArgs::new(dir.path());
        args.config = Some(cfg.clone());
        args.seed = Some(6);
        let bc = args.battery_config().unwrap();
        assert_eq!(bc.base_seed, 6);
        assert_eq!(bc.p_grid, Some(vec![1.0]));
        assert_eq!(bc.significance, 0.01);

        fs::write(&cfg, "n_grid = 5\n").unwrap();
        assert!(matches!(args.battery_config(), Err(Error::Config(_))));
    }

    #[test]
    fn simulate_command_line_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let args = SimulateArgs {
            p: 0.3,
            n: 50,
            reps: 4,
            seed: 11,
            mode: SamplerKind::Decomposed,
            trajectories: true,
            out: dir.path().join("a"),
        };
        let outcome = cmd_simulate(&args).unwrap();
        let argv = rerun_argv(&outcome.manifest, &args.out).unwrap();
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Simulate(parsed) => assert_eq!(parsed, args),
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn trajectory_dump_matches_positions() {
        let dir = tempfile::tempdir().unwrap();
        for mode in SamplerKind::ALL {
            let mut args = SimulateArgs {
                p: 0.6,
                n: 40,
                reps: 5,
                seed: 3,
                mode,
                trajectories: false,
                out: dir.path().join(format!("{mode}-plain")),
            };
            cmd_simulate(&args).unwrap();
            let plain = fs::read(args.out.join("positions.csv")).unwrap();
            args.trajectories = true;
            args.out = dir.path().join(format!("{mode}-traj"));
            cmd_simulate(&args).unwrap();
            let dumped = fs::read(args.out.join("positions.csv")).unwrap();
            assert_eq!(plain, dumped, "{mode}");
        }
    }

    #[test]
    fn trajectory_cap_is_enforced() {
        let dir = tempfile::tempdir().unwrap();
        let args = SimulateArgs {
            p: 0.5,
            n: TRAJECTORY_CAP + 1,
            reps: 1,
            seed: 1,
            mode: SamplerKind::Counts,
            trajectories: true,
            out: dir.path().to_path_buf(),
        };
        let err = cmd_simulate(&args).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_USAGE);
    }
}
