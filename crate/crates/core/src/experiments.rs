//! Seeded Monte Carlo estimates, the analytic oscillation table, and run
//! persistence (CSV plus a JSON manifest).
//!
//! Trial `t` of a run with master seed `s` samples its graph from
//! `Seed { master: s, stream: t }`, and per-trial results are combined by
//! exact integer sums, so results never depend on scheduling.

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    diag_expectation_asymptotic, expected_count, first_moment_sum, seq_large, seq_small, LogReal, Params,
};
use crate::error::{Error, Result};
use crate::graph::{check_probability, sample_gnp, Seed};
use crate::oracle::{exact_moments, exact_union_probability, ORACLE_MAX_N, UNION_MAX_N};
use crate::witness::{
    count_special_with, enumeration_size, exists_special, SearchBudget, COUNT_ENUMERATION_LIMIT,
};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

pub const CSV_HEADER: [&str; 13] =
    ["experiment", "i", "n", "p", "k", "l", "m", "trials", "seed", "estimate", "ci_lo", "ci_hi", "analytic"];

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// Wilson score interval for a proportion.
    Wilson,
    /// `mean ± z·SE` for a sample mean.
    NormalMean,
}

/// Outcome of a Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunResult {
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub interval: IntervalKind,
    /// Standard error of the mean; absent for proportions.
    pub std_error: Option<f64>,
    pub trials: u64,
    /// Exact or closed-form value of the estimated quantity, when known.
    pub analytic: Option<f64>,
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0);
    let t = trials as f64;
    let phat = successes as f64 / t;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / t;
    let centre = (phat + z2 / (2.0 * t)) / denom;
    let half = Z95 / denom * (phat * (1.0 - phat) / t + z2 / (4.0 * t * t)).sqrt();
    // The endpoints at 0 and 1 are exact; rounding would nudge them inward.
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::invalid("trials must be positive"))
    } else {
        Ok(())
    }
}

/// Runs `f` on trials `0..trials` in parallel and returns the results in
/// trial order. The first failing trial (by index) decides the error.
fn run_trials<T: Send>(trials: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let out: Vec<Result<T>> = (0..trials).into_par_iter().map(f).collect();
    out.into_iter().collect()
}

/// Sample mean of `X(k, l, m)` over `trials` graphs from `G(n, p)`.
pub fn estimate_expectation(n: usize, p: f64, k: usize, l: usize, m: usize, trials: u64, seed: u64) -> Result<RunResult> {
    check_trials(trials)?;
    let prm = Params::new(n as u64, p)?;
    prm.check_point(k as u64, l as u64, m as u64)?;
    let size = enumeration_size(n, k, l, m);
    if size > COUNT_ENUMERATION_LIMIT {
        return Err(Error::Infeasible(format!("exact count over {size:.3e} set triples is out of reach")));
    }
    let master = Seed::new(seed);
    let counts = run_trials(trials, |t| {
        let g = sample_gnp(n, p, master.with_stream(t))?;
        count_special_with(&g, k, l, m, false)
    })?;
    let sum: u128 = counts.iter().map(|&x| x as u128).sum();
    let sum_sq: u128 = counts.iter().map(|&x| x as u128 * x as u128).sum();
    let t = trials as f64;
    let mean = sum as f64 / t;
    let std_error = if trials > 1 {
        let var = ((sum_sq as f64) - (sum as f64) * mean) / (t - 1.0);
        (var.max(0.0) / t).sqrt()
    } else {
        0.0
    };
    Ok(RunResult {
        estimate: mean,
        ci_lo: mean - Z95 * std_error,
        ci_hi: mean + Z95 * std_error,
        interval: IntervalKind::NormalMean,
        std_error: Some(std_error),
        trials,
        analytic: Some(expected_count(&prm, k as u64, l as u64, m as u64)?.to_f64()),
    })
}

/// What a probability estimate is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityMode {
    /// Some special tuple of any sizes exists.
    Union,
    /// `X(k, l, m) > 0`.
    Fixed { k: usize, l: usize, m: usize },
}

/// Fraction of `trials` graphs from `G(n, p)` having the event, with a
/// Wilson interval.
pub fn estimate_probability(n: usize, p: f64, trials: u64, seed: u64, mode: ProbabilityMode) -> Result<RunResult> {
    check_trials(trials)?;
    let prm = Params::new(n as u64, p)?;
    let master = Seed::new(seed);
    let budget = SearchBudget::default();
    let hits: Vec<bool> = match mode {
        ProbabilityMode::Union => {
            if n > budget.max_n {
                return Err(Error::Infeasible(format!(
                    "exact existence search is limited to n <= {}, got n = {n}",
                    budget.max_n
                )));
            }
            run_trials(trials, |t| {
                let g = sample_gnp(n, p, master.with_stream(t))?;
                Ok(exists_special(&g, &budget)?.is_found())
            })?
        }
        ProbabilityMode::Fixed { k, l, m } => {
            prm.check_point(k as u64, l as u64, m as u64)?;
            let size = enumeration_size(n, k, l, m);
            if size > COUNT_ENUMERATION_LIMIT {
                return Err(Error::Infeasible(format!("exact count over {size:.3e} set triples is out of reach")));
            }
            run_trials(trials, |t| {
                let g = sample_gnp(n, p, master.with_stream(t))?;
                Ok(count_special_with(&g, k, l, m, false)? > 0)
            })?
        }
    };
    let successes = hits.iter().filter(|&&h| h).count() as u64;
    let (ci_lo, ci_hi) = wilson_interval(successes, trials);
    let analytic = match mode {
        ProbabilityMode::Union if n <= UNION_MAX_N => Some(exact_union_probability(n, p)?),
        ProbabilityMode::Fixed { k, l, m } if n <= ORACLE_MAX_N => Some(exact_moments(n, p, k, l, m)?.p_positive),
        _ => None,
    };
    Ok(RunResult {
        estimate: successes as f64 / trials as f64,
        ci_lo,
        ci_hi,
        interval: IntervalKind::Wilson,
        std_error: None,
        trials,
        analytic,
    })
}

/// One index of the analytic oscillation table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OscillationRow {
    pub i: u64,
    pub n_small: u64,
    pub first_moment_sum: LogReal,
    pub n_large: u64,
    pub diag_expectation: LogReal,
    pub diag_asymptotic: f64,
}

/// For each `i`: the first moment sum at `n = seq_small(p, i)` and the
/// diagonal expectation `E X(i, i, i)` at `n = seq_large(p, i)` next to its
/// leading-order form.
pub fn oscillation_table(p: f64, i_range: RangeInclusive<u64>) -> Result<Vec<OscillationRow>> {
    check_probability(p)?;
    if i_range.is_empty() {
        return Err(Error::invalid("empty index range"));
    }
    i_range
        .map(|i| {
            let n_small = seq_small(p, i)?;
            let n_large = seq_large(p, i)?;
            let fm = first_moment_sum(&Params::new(n_small, p)?)?;
            let large = Params::new(n_large, p)?;
            let diag = if 3 * i <= n_large { expected_count(&large, i, i, i)? } else { LogReal::ZERO };
            Ok(OscillationRow {
                i,
                n_small,
                first_moment_sum: fm.total,
                n_large,
                diag_expectation: diag,
                diag_asymptotic: diag_expectation_asymptotic(p, i)?,
            })
        })
        .collect()
}

/// One CSV line; `None` fields are written empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvRow {
    pub experiment: String,
    pub i: Option<u64>,
    pub n: Option<u64>,
    pub p: Option<f64>,
    pub k: Option<u64>,
    pub l: Option<u64>,
    pub m: Option<u64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub estimate: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub analytic: Option<f64>,
}

/// Reals as printed everywhere by this crate: 15 significant digits, then
/// the shortest decimal that reads back to that value.
pub fn format_real(x: f64) -> String {
    serde_json::to_string(&crate::numeric::round_sig15(x)).unwrap_or_else(|_| "null".into())
}

impl CsvRow {
    pub fn from_result(experiment: &str, manifest: &RunManifest, result: &RunResult) -> Self {
        CsvRow {
            experiment: experiment.to_string(),
            n: Some(manifest.n as u64),
            p: Some(manifest.p),
            k: manifest.k.map(|v| v as u64),
            l: manifest.l.map(|v| v as u64),
            m: manifest.m.map(|v| v as u64),
            trials: Some(result.trials),
            seed: Some(manifest.seed),
            estimate: Some(result.estimate),
            ci_lo: Some(result.ci_lo),
            ci_hi: Some(result.ci_hi),
            analytic: result.analytic,
            ..Default::default()
        }
    }

    fn fields(&self) -> [String; 13] {
        let int = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let real = |v: Option<f64>| v.map(format_real).unwrap_or_default();
        [
            self.experiment.clone(),
            int(self.i),
            int(self.n),
            real(self.p),
            int(self.k),
            int(self.l),
            int(self.m),
            int(self.trials),
            int(self.seed),
            real(self.estimate),
            real(self.ci_lo),
            real(self.ci_hi),
            real(self.analytic),
        ]
    }
}

/// Three rows per index: the first moment sum, the exact diagonal
/// expectation and its asymptotic form. Values go in the `analytic` column.
pub fn oscillation_rows(p: f64, rows: &[OscillationRow]) -> Vec<CsvRow> {
    let mut out = Vec::with_capacity(3 * rows.len());
    for r in rows {
        let base = CsvRow { i: Some(r.i), p: Some(p), ..Default::default() };
        out.push(CsvRow {
            experiment: "first_moment_sum".into(),
            n: Some(r.n_small),
            analytic: Some(r.first_moment_sum.to_f64()),
            ..base.clone()
        });
        let diag = CsvRow { n: Some(r.n_large), k: Some(r.i), l: Some(r.i), m: Some(r.i), ..base };
        out.push(CsvRow {
            experiment: "diag_expectation".into(),
            analytic: Some(r.diag_expectation.to_f64()),
            ..diag.clone()
        });
        out.push(CsvRow { experiment: "diag_asymptotic".into(), analytic: Some(r.diag_asymptotic), ..diag });
    }
    out
}

/// Writes the header and rows as CSV.
pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to reproduce a run, written next to its CSV.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub run_id: String,
    pub experiment: String,
    pub n: usize,
    pub p: f64,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub i_range: Option<[u64; 2]>,
    pub trials: u64,
    pub seed: u64,
    pub tool_version: String,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
    pub notes: Vec<String>,
    /// Fully resolved command-line configuration.
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(run_id: impl Into<String>, experiment: impl Into<String>, n: usize, p: f64, trials: u64, seed: u64) -> Self {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            run_id: run_id.into(),
            experiment: experiment.into(),
            n,
            p,
            k: None,
            l: None,
            m: None,
            i_range: None,
            trials,
            seed,
            tool_version: TOOL_VERSION.to_string(),
            timestamp,
            notes: Vec::new(),
            config: serde_json::Value::Null,
        }
    }
}

/// Note attached to every oscillation manifest.
pub const ANALYTIC_ONLY_NOTE: &str = "Oscillation evidence at sequence scale is analytic only: exact witness search \
     at those n is out of reach, so Monte Carlo estimates are limited to n <= 24.";

/// Writes `<dir>/<run-id>.csv` and `<dir>/<run-id>.manifest.json`.
pub fn write_run(dir: &Path, manifest: &RunManifest, rows: &[CsvRow]) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", manifest.run_id));
    let manifest_path = dir.join(format!("{}.manifest.json", manifest.run_id));
    write_csv(std::fs::File::create(&csv_path)?, rows)?;
    let mut f = std::fs::File::create(&manifest_path)?;
    serde_json::to_writer_pretty(&mut f, manifest)?;
    writeln!(f)?;
    Ok((csv_path, manifest_path))
}
