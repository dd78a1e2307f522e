//! CSV/JSON output and run manifests.
//!
//! CSV files are UTF-8 with `\n` line endings and a header row; floats are
//! written with 17 significant digits in scientific notation so files are
//! byte-identical across platforms.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::{BatteryReport, Check, CltReport, LlnReport};
use crate::rng::PRNG_ID;

pub const TOOL_NAME: &str = "erwhex";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `{:.16e}`: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Shortest form for grid labels in file names and CSV key columns.
pub fn fmt_param(x: f64) -> String {
    format!("{x}")
}

/// Accumulates CSV text.
#[derive(Debug)]
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv {
            text,
            width: header.len(),
        }
    }

    /// Adds a comment line before the header row.
    pub fn with_preamble(mut self, lines: &[String]) -> Self {
        let mut pre: String = lines.iter().map(|l| format!("# {l}\n")).collect();
        pre.push_str(&self.text);
        self.text = pre;
        self
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.width, "CSV row width");
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.text)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_param).unwrap_or_default()
}

fn opt_u64(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn checks_csv(checks: &[Check]) -> Csv {
    let mut csv = Csv::new(&[
        "suite",
        "check",
        "p",
        "n",
        "statistic",
        "threshold",
        "kind",
        "nominal_rate",
        "passed",
    ]);
    for c in checks {
        csv.row(&[
            c.suite.clone(),
            c.name.clone(),
            opt_f64(c.p),
            opt_u64(c.n),
            fmt_f64(c.statistic),
            fmt_f64(c.threshold),
            c.kind.label().to_string(),
            fmt_f64(c.kind.nominal_rate()),
            c.passed.to_string(),
        ]);
    }
    csv
}

pub fn lln_csv(report: &LlnReport) -> Csv {
    let mut csv = Csv::new(&[
        "sampler",
        "p",
        "n",
        "mean_abs_over_n",
        "stderr_abs_over_n",
        "mean_x_over_n",
        "mean_y_over_n",
        "stderr_x_over_n",
        "stderr_y_over_n",
    ]);
    for r in &report.rows {
        csv.row(&[
            report.sampler.to_string(),
            fmt_param(r.p),
            r.n.to_string(),
            fmt_f64(r.mean_abs_over_n),
            fmt_f64(r.stderr_abs_over_n),
            fmt_f64(r.mean_x_over_n),
            fmt_f64(r.mean_y_over_n),
            fmt_f64(r.stderr_x_over_n),
            fmt_f64(r.stderr_y_over_n),
        ]);
    }
    csv
}

pub fn clt_csv(report: &CltReport) -> Csv {
    let mut csv = Csv::new(&[
        "sampler",
        "p",
        "n",
        "mean_x",
        "mean_y",
        "var_x",
        "var_y",
        "cov_xy",
        "ks_x",
        "ks_y",
        "ks_critical",
        "isotropy",
    ]);
    for r in &report.rows {
        csv.row(&[
            report.sampler.to_string(),
            fmt_param(r.p),
            r.n.to_string(),
            fmt_f64(r.mean_x),
            fmt_f64(r.mean_y),
            fmt_f64(r.var_x),
            fmt_f64(r.var_y),
            fmt_f64(r.cov_xy),
            fmt_f64(r.ks_x),
            fmt_f64(r.ks_y),
            fmt_f64(r.ks_critical),
            fmt_f64(r.isotropy),
        ]);
    }
    csv
}

pub fn clt_cross_p_csv(report: &CltReport) -> Csv {
    let mut csv = Csv::new(&["p_a", "p_b", "n", "ks_x", "ks_y", "critical"]);
    for &(pa, pb, n, dx, dy, crit) in &report.cross_p {
        csv.row(&[
            fmt_param(pa),
            fmt_param(pb),
            n.to_string(),
            fmt_f64(dx),
            fmt_f64(dy),
            fmt_f64(crit),
        ]);
    }
    csv
}

/// Writes the CLT report's tables and histograms into `dir` with file names
/// prefixed by `prefix`.
pub fn write_clt(report: &CltReport, dir: &Path, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let path = dir.join(format!("{prefix}clt.csv"));
    clt_csv(report).write(&path)?;
    files.push(path);
    let path = dir.join(format!("{prefix}clt_cross_p.csv"));
    clt_cross_p_csv(report).write(&path)?;
    files.push(path);
    for (p, n, bins) in &report.histograms {
        let mut csv = Csv::new(&["bin_left", "bin_right", "count"]);
        for b in bins {
            csv.row(&[
                fmt_f64(b.bin_left),
                fmt_f64(b.bin_right),
                b.count.to_string(),
            ]);
        }
        let path = dir.join(format!("{prefix}clt_hist_x_p{}_n{n}.csv", fmt_param(*p)));
        csv.write(&path)?;
        files.push(path);
    }
    Ok(files)
}

#[derive(Serialize)]
struct Summary<'a> {
    tool: &'static str,
    version: &'static str,
    prng: &'static str,
    base_seed: u64,
    significance: f64,
    passed: bool,
    tally: &'a crate::harness::Tally,
    suites: &'a crate::harness::BatterySuites,
    checks: &'a [Check],
}

/// Writes every table of a battery run into `dir`. Returns the files in
/// the order written.
pub fn write_battery(report: &BatteryReport, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut files = Vec::new();

    let path = dir.join("checks.csv");
    checks_csv(&report.checks).write(&path)?;
    files.push(path);

    let mut csv = Csv::new(&[
        "p",
        "n",
        "mean_x",
        "mean_y",
        "second_moment_radius",
        "var_x",
        "var_y",
        "cov_xy",
    ]);
    for r in &report.moments {
        let m = &r.moments;
        csv.row(&[
            fmt_param(r.p),
            r.n.to_string(),
            fmt_f64(m.mean_x),
            fmt_f64(m.mean_y),
            fmt_f64(m.second_moment_radius),
            fmt_f64(m.var_x),
            fmt_f64(m.var_y),
            fmt_f64(m.cov_xy),
        ]);
    }
    let path = dir.join("moments.csv");
    csv.write(&path)?;
    files.push(path);

    let mut csv = Csv::new(&[
        "p",
        "n",
        "plus_fraction",
        "acf1",
        "acf2",
        "acf3",
        "acf4",
        "sign_axis_chi_square",
        "axis1_visits",
        "axis1_plus",
        "axis2_visits",
        "axis2_plus",
        "axis3_visits",
        "axis3_plus",
    ]);
    for r in &report.claim1.rows {
        let mut fields = vec![fmt_param(r.p), r.n.to_string(), fmt_f64(r.plus_fraction)];
        fields.extend(r.autocorrelations.iter().map(|&a| fmt_f64(a)));
        fields.push(fmt_f64(r.sign_axis_chi_square));
        for (visits, frac) in r.axis_substreams {
            fields.push(visits.to_string());
            fields.push(fmt_f64(frac));
        }
        csv.row(&fields);
    }
    let path = dir.join("claim1.csv");
    csv.write(&path)?;
    files.push(path);

    let mut csv = Csv::new(&[
        "p",
        "n",
        "path_deviation",
        "mean_c1",
        "mean_c2",
        "mean_c3",
        "stderr_c1",
        "stderr_c2",
        "stderr_c3",
    ]);
    for r in &report.claim2.rows {
        let mut fields = vec![fmt_param(r.p), r.n.to_string(), fmt_f64(r.path_deviation)];
        for arr in [r.replication_means, r.replication_stderrs] {
            match arr {
                Some(a) => fields.extend(a.iter().map(|&x| fmt_f64(x))),
                None => fields.extend(std::iter::repeat_n(String::new(), 3)),
            }
        }
        csv.row(&fields);
    }
    let path = dir.join("claim2.csv");
    csv.write(&path)?;
    files.push(path);

    let path = dir.join("lln.csv");
    lln_csv(&report.lln).write(&path)?;
    files.push(path);

    files.extend(write_clt(&report.clt, dir, "")?);

    let summary = Summary {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        prng: PRNG_ID,
        base_seed: report.config.base_seed,
        significance: report.config.significance,
        passed: report.tally.passed,
        tally: &report.tally,
        suites: &report.suites,
        checks: &report.checks,
    };
    let path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    write_text(&path, &json)?;
    files.push(path);
    Ok(files)
}

/// Everything needed to rerun a command and check its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub base_seed: u64,
    pub prng: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch; excluded from `reproducibility_hash`.
    pub timestamp: u64,
    /// Worker threads used; excluded from `reproducibility_hash`.
    pub threads: usize,
    pub outputs: Vec<OutputFile>,
    /// SHA-256 over command, parameters, seed, PRNG, version and output
    /// hashes.
    pub reproducibility_hash: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl RunManifest {
    pub fn build(
        command: &str,
        parameters: serde_json::Value,
        base_seed: u64,
        dir: &Path,
        files: &[PathBuf],
    ) -> Result<Self> {
        let mut outputs = Vec::new();
        for f in files {
            let bytes = fs::read(f).map_err(|e| Error::io(f, e))?;
            let rel = f.strip_prefix(dir).unwrap_or(f);
            outputs.push(OutputFile {
                path: rel.to_string_lossy().replace('\\', "/"),
                sha256: sha256_hex(&bytes),
            });
        }
        let mut hasher = Sha256::new();
        let stable = serde_json::json!({
            "command": command,
            "parameters": parameters,
            "base_seed": base_seed,
            "prng": PRNG_ID,
            "tool_version": TOOL_VERSION,
            "outputs": outputs.iter().map(|o| [&o.path, &o.sha256]).collect::<Vec<_>>(),
        });
        hasher.update(serde_json::to_vec(&stable)?);
        let reproducibility_hash = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(RunManifest {
            command: command.to_string(),
            parameters,
            base_seed,
            prng: PRNG_ID.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            threads: rayon::current_num_threads(),
            outputs,
            reproducibility_hash,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        write_text(&path, &json)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_f64(1.0 / 6.0), "1.6666666666666666e-1");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
        let parsed: f64 = fmt_f64(std::f64::consts::PI).parse().unwrap();
        assert_eq!(parsed, std::f64::consts::PI);
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&["a", "b"]).with_preamble(&["n=1".to_string()]);
        csv.row(&["1".into(), "2".into()]);
        assert_eq!(csv.as_str(), "# n=1\na,b\n1,2\n");
    }
}
