//! Command-line front end for the `emso` binary.
//!
//! Every subcommand writes one JSON object (or a CSV table) to stdout and
//! diagnostics to stderr. Reals are rounded to 15 significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analytic::{
    expected_count, f_value, first_moment_sum, g_value, grad_f, hessian_f, joint_domination_probability,
    k_star_asymptotic, k_star_exact, lemma2_bound, lemma3_bound, lemma4_vertex_bound, r0_of, s1_term_bound,
    s2_envelope, s3_exponents, seq_large, seq_small, Params, Sequence,
};
use crate::error::{Error, Result};
use crate::experiments::{
    estimate_expectation, estimate_probability, oscillation_rows, oscillation_table, write_csv, write_run, CsvRow,
    ProbabilityMode, RunManifest, ANALYTIC_ONLY_NOTE,
};
use crate::graph::{read_edge_list, sample_gnp, write_edge_list, Graph, Seed};
use crate::numeric::round_sig15;
use crate::oracle::{exact_union_probability, OracleTable};
use crate::witness::{count_special, cross_pair_count, exists_special, is_special, Existence, KTuple, OverlapPattern, SearchBudget};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser, Serialize)]
#[command(name = "emso", version = VERSION, about = "Special tuples in G(n,p): counting, moments, oracle and simulation")]
pub struct Cli {
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Sample a graph from G(n,p).
    Sample(SampleArgs),
    /// Check whether a given tuple is special in a graph.
    Check(CheckArgs),
    /// Count special tuples of sizes (k, l, m).
    Count(CountArgs),
    /// Decide whether a graph has any special tuple.
    Exists(ExistsArgs),
    /// Exact expectation E X(k, l, m) with the exponents f and g.
    Expect(PointArgs),
    /// Solve for k*.
    Kstar(KstarArgs),
    /// Terms of the two index sequences.
    Seq(SeqArgs),
    /// Sum of E X(k, l, m) over all of D_n.
    FirstMoment(NpArgs),
    /// Second-moment bounds at (p, k).
    Bounds(BoundsArgs),
    /// Exact moments by enumerating every graph (n <= 6).
    Oracle(OracleArgs),
    /// Monte Carlo estimate of an expectation or probability.
    Simulate(SimulateArgs),
    /// Analytic oscillation table along both sequences.
    Oscillate(OscillateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SeedArg {
    /// Master seed; defaults to $EMSO_SEED, then 0.
    #[arg(long, env = "EMSO_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Stream index under the master seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Also write the edge list to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Tuple such as "X1=1,2;x1=1;X2=3;x2=3;X3=4;x3=4".
    #[arg(long)]
    pub tuple: String,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ExistsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Randomised search; may answer "unknown".
    #[arg(long)]
    pub heuristic: bool,
    /// Largest n accepted by exact search.
    #[arg(long, default_value_t = 24)]
    pub max_n: usize,
    #[arg(long, default_value_t = 100_000_000)]
    pub node_limit: u64,
    /// Restarts for heuristic search.
    #[arg(long, default_value_t = 1000)]
    pub restarts: u32,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args, Serialize)]
pub struct NpArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PointArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub l: u64,
    #[arg(long)]
    pub m: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct KstarArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p: f64,
    /// Report the leading-order formula instead of the root.
    #[arg(long)]
    pub asymptotic: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SeqArgs {
    #[arg(long)]
    pub which: String,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub i: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub k: u64,
    /// Total overlap r.
    #[arg(long)]
    pub r: Option<u64>,
    /// Overrides r0 for the large-overlap pieces and the concentrated-row bound.
    #[arg(long)]
    pub r0: Option<u64>,
    /// Overlap matrix "a,b,c;d,e,f;g,h,i", row i giving |Y_i ∩ X_j|.
    #[arg(long)]
    pub pattern: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, requires_all = ["l", "m"])]
    pub k: Option<usize>,
    #[arg(long, requires_all = ["k", "m"])]
    pub l: Option<usize>,
    #[arg(long, requires_all = ["k", "l"])]
    pub m: Option<usize>,
    /// Probability that some special tuple exists (n <= 5).
    #[arg(long, conflicts_with_all = ["k", "l", "m"])]
    pub union: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, requires_all = ["l", "m"])]
    pub k: Option<usize>,
    #[arg(long, requires_all = ["k", "m"])]
    pub l: Option<usize>,
    #[arg(long, requires_all = ["k", "l"])]
    pub m: Option<usize>,
    /// Estimate P(some special tuple exists) instead of E X(k, l, m).
    #[arg(long, conflicts_with_all = ["k", "l", "m"])]
    pub union: bool,
    /// With --k/--l/--m, estimate P(X(k, l, m) > 0) instead of E X.
    #[arg(long, requires = "k")]
    pub probability: bool,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Directory for <run-id>.csv and <run-id>.manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub run_id: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct OscillateArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 5)]
    pub i_min: u64,
    #[arg(long, default_value_t = 20)]
    pub i_max: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub run_id: Option<String>,
}

/// Rounds every non-integer number in a JSON tree to 15 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig15(x)) {
                    *num = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn emit_json(out: &mut dyn Write, value: impl Serialize) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    round_json(&mut v);
    serde_json::to_writer(&mut *out, &v)?;
    writeln!(out)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    read_edge_list(&text)
}

fn parse_pattern(s: &str) -> Result<OverlapPattern> {
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != 3 {
        return Err(Error::invalid("pattern needs three rows separated by ';'"));
    }
    let mut rij = [[0u32; 3]; 3];
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != 3 {
            return Err(Error::invalid("each pattern row needs three entries separated by ','"));
        }
        for (j, c) in cells.iter().enumerate() {
            rij[i][j] = c.trim().parse().map_err(|_| Error::invalid(format!("bad pattern entry {c:?}")))?;
        }
    }
    Ok(OverlapPattern::from_matrix(rij))
}

/// Value of an optional computation, or `null` with the reason when its
/// preconditions do not hold.
fn optional<T: Serialize>(r: Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).unwrap_or(Value::Null),
        Err(e) => json!({ "unavailable": e.to_string() }),
    }
}

fn config_value(cli: &Cli) -> Value {
    serde_json::to_value(cli).unwrap_or(Value::Null)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Sample(a) => {
            let g = sample_gnp(a.n, a.p, Seed { master: a.seed.seed, stream: a.stream })?;
            let text = write_edge_list(&g);
            if let Some(path) = &a.out {
                std::fs::write(path, &text)?;
            }
            emit_json(
                out,
                json!({
                    "n": a.n, "p": a.p, "seed": a.seed.seed, "stream": a.stream,
                    "edge_count": g.edge_count(), "edge_list": text,
                }),
            )
        }
        Command::Check(a) => {
            let g = load_graph(&a.graph)?;
            let t: KTuple = a.tuple.parse()?;
            emit_json(out, json!({ "tuple": t, "special": is_special(&g, &t)? }))
        }
        Command::Count(a) => {
            let g = load_graph(&a.graph)?;
            let count = count_special(&g, a.k, a.l, a.m)?;
            emit_json(out, json!({ "n": g.n(), "k": a.k, "l": a.l, "m": a.m, "count": count }))
        }
        Command::Exists(a) => {
            let g = load_graph(&a.graph)?;
            let mut budget = if a.heuristic { SearchBudget::heuristic(a.seed.seed) } else { SearchBudget::default() };
            budget.max_n = a.max_n;
            budget.node_limit = a.node_limit;
            budget.restarts = a.restarts;
            let (verdict, witness) = match exists_special(&g, &budget)? {
                Existence::Found(t) => ("true", Some(t)),
                Existence::Absent => ("false", None),
                Existence::Unknown => ("unknown", None),
            };
            emit_json(out, json!({ "n": g.n(), "mode": budget.mode, "exists": verdict, "witness": witness }))
        }
        Command::Expect(a) => {
            let prm = Params::new(a.n, a.p)?;
            let e = expected_count(&prm, a.k, a.l, a.m)?;
            let x = [a.k as f64, a.l as f64, a.m as f64];
            emit_json(
                out,
                json!({
                    "n": a.n, "p": a.p, "k": a.k, "l": a.l, "m": a.m,
                    "expected_count": e,
                    "f_value": f_value(&prm, x)?,
                    "g_value": g_value(&prm, x)?,
                    "grad_f": grad_f(&prm, x)?,
                    "hessian_f": hessian_f(&prm, x)?,
                }),
            )
        }
        Command::Kstar(a) => {
            let prm = Params::new(a.n, a.p)?;
            if a.asymptotic {
                emit_json(out, json!({ "n": a.n, "p": a.p, "k_star_asymptotic": k_star_asymptotic(&prm)? }))
            } else {
                let r = k_star_exact(&prm)?;
                emit_json(
                    out,
                    json!({
                        "n": a.n, "p": a.p, "k_star": r.k_star, "residual": r.residual,
                        "bisection_steps": r.bisection_steps, "newton_steps": r.newton_steps,
                    }),
                )
            }
        }
        Command::Seq(a) => {
            let n = match a.which.parse::<Sequence>()? {
                Sequence::Small => seq_small(a.p, a.i)?,
                Sequence::Large => seq_large(a.p, a.i)?,
            };
            emit_json(out, json!({ "n": n }))
        }
        Command::FirstMoment(a) => {
            let prm = Params::new(a.n, a.p)?;
            let fm = first_moment_sum(&prm)?;
            emit_json(out, json!({ "n": a.n, "p": a.p, "first_moment_sum": fm.total, "window": fm.window,
                "terms": fm.terms, "covers_domain": fm.covers_domain, "boundary_max": fm.boundary_max }))
        }
        Command::Bounds(a) => bounds(a, out),
        Command::Oracle(a) => {
            if a.union {
                let u = exact_union_probability(a.n, a.p)?;
                return emit_json(out, json!({ "n": a.n, "p": a.p, "union_probability": u }));
            }
            let table = OracleTable::build(a.n)?;
            match (a.k, a.l, a.m) {
                (Some(k), Some(l), Some(m)) => emit_json(out, table.moments(a.p, k, l, m)?),
                _ => emit_json(out, table.moments_all(a.p)?),
            }
        }
        Command::Simulate(a) => simulate(cli, a, out),
        Command::Oscillate(a) => {
            if a.i_min > a.i_max {
                return Err(Error::invalid("--i-min must not exceed --i-max"));
            }
            let table = oscillation_table(a.p, a.i_min..=a.i_max)?;
            let rows = oscillation_rows(a.p, &table);
            if let Some(dir) = &a.out {
                let run_id = a.run_id.clone().unwrap_or_else(|| format!("oscillate-p{}-i{}-{}", a.p, a.i_min, a.i_max));
                let mut manifest = RunManifest::new(run_id, "oscillation", 0, a.p, 0, 0);
                manifest.i_range = Some([a.i_min, a.i_max]);
                manifest.notes.push(ANALYTIC_ONLY_NOTE.to_string());
                manifest.config = config_value(cli);
                write_run(dir, &manifest, &rows)?;
            }
            write_csv(out, &rows)
        }
    }
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let r0 = r0_of(a.p)?;
    let mut obj = json!({
        "p": a.p, "k": a.k, "r0_of": r0,
        "lemma4_vertex_bound": lemma4_vertex_bound(a.p, a.k)?,
        "s2_envelope": s2_envelope(a.p, a.k)?,
    });
    let map = obj.as_object_mut().expect("object literal");
    let r0_used = a.r0.unwrap_or(r0);
    if let Some(r) = a.r {
        map.insert("r".into(), json!(r));
        map.insert("lemma2_bound".into(), serde_json::to_value(lemma2_bound(a.p, a.k, r)?)?);
        map.insert("s1_term_bound".into(), optional(s1_term_bound(a.p, a.k, r)));
        map.insert("s3_exponents".into(), optional(s3_exponents(a.p, a.k, r, r0_used)));
    }
    if let Some(text) = &a.pattern {
        let pattern = parse_pattern(text)?;
        let k32 = u32::try_from(a.k).map_err(|_| Error::invalid("k too large"))?;
        map.insert("pattern".into(), serde_json::to_value(pattern)?);
        map.insert("cross_pair_count".into(), optional(cross_pair_count(&pattern, k32)));
        map.insert("joint_domination_probability".into(), optional(joint_domination_probability(&pattern, a.p, a.k)));
        map.insert("lemma3_bound".into(), optional(lemma3_bound(a.p, a.k, &pattern, r0_used)));
    }
    emit_json(out, obj)
}

fn simulate(cli: &Cli, a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let seed = a.seed.seed;
    let (experiment, result) = match (a.union, a.k, a.l, a.m) {
        (true, ..) => ("probability_union", estimate_probability(a.n, a.p, a.trials, seed, ProbabilityMode::Union)?),
        (false, Some(k), Some(l), Some(m)) if a.probability => (
            "probability_fixed",
            estimate_probability(a.n, a.p, a.trials, seed, ProbabilityMode::Fixed { k, l, m })?,
        ),
        (false, Some(k), Some(l), Some(m)) => ("expectation", estimate_expectation(a.n, a.p, k, l, m, a.trials, seed)?),
        _ => return Err(Error::invalid("simulate needs --k/--l/--m or --union")),
    };
    let run_id = a.run_id.clone().unwrap_or_else(|| format!("{experiment}-n{}-p{}-s{seed}", a.n, a.p));
    let mut manifest = RunManifest::new(run_id, experiment, a.n, a.p, a.trials, seed);
    (manifest.k, manifest.l, manifest.m) = (a.k, a.l, a.m);
    manifest.config = config_value(cli);
    let rows = vec![CsvRow::from_result(experiment, &manifest, &result)];
    if let Some(dir) = &a.out {
        write_run(dir, &manifest, &rows)?;
    }
    write_csv(out, &rows)
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let mut buf = Vec::new();
    match pool.install(|| dispatch(&cli, &mut buf)) {
        Ok(()) => {
            let _ = out.write_all(&buf);
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
