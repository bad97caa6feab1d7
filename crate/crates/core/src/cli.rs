//! Command-line front end.
//!
//! Exit codes: 0 success, 1 data or runtime error, 2 usage error, 3 oracle
//! size guard.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataio::{self, GenConfig, PatternFormat, PreciseFormat};
use crate::error::{Error, Result};
use crate::fuws::{fuws_with, Bound, FuwsOptions};
use crate::incremental::{completeness, Algo, IncrementalState, Stream};
use crate::model::{MiningParams, ScoredPattern, Thresholds, UncertainDatabase, WeightTable};
use crate::oracle::oracle_mine;

#[derive(Parser, Debug)]
#[command(name = "useqmine", version, about = "Weighted sequential pattern mining over uncertain databases")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true, env = "USEQMINE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Mine weighted (semi-)frequent patterns from a static database.
    Mine(MineArgs),
    /// Maintain the frequent set over a sequence of increments.
    Inc(IncArgs),
    /// Turn a precise dataset into an uncertain, weighted one.
    Gen(GenArgs),
    /// Exhaustive reference miner for small databases.
    Oracle(MineArgs),
    /// Compare the expected-support bounds over several thresholds.
    Bench(BenchArgs),
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1]"))
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be > 0"))
    }
}

fn open_unit(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Tsv,
    JsonLines,
}

impl From<OutFormat> for PatternFormat {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Tsv => PatternFormat::Tsv,
            OutFormat::JsonLines => PatternFormat::JsonLines,
        }
    }
}

#[derive(Args, Debug)]
struct MineArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, value_parser = unit_interval)]
    min_sup: f64,
    #[arg(long, value_parser = positive)]
    wgt_fct: f64,
    /// Buffer ratio; values below 1 also report semi-frequent patterns.
    #[arg(long, value_parser = unit_interval, default_value_t = 1.0)]
    mu: f64,
    /// Pattern output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Tsv)]
    format: OutFormat,
    /// Single-row CSV run report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Uwsinc,
    #[value(name = "uwsinc+")]
    UwsincPlus,
    Baseline,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Uwsinc => Algo::UwsInc,
            AlgoArg::UwsincPlus => Algo::UwsIncPlus,
            AlgoArg::Baseline => Algo::Baseline,
        }
    }
}

#[derive(Args, Debug)]
struct IncArgs {
    #[arg(long, required_unless_present = "resume")]
    init: Option<PathBuf>,
    /// Increments, applied in order.
    #[arg(long, num_args = 1.., required = true)]
    delta: Vec<PathBuf>,
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long, value_parser = unit_interval)]
    min_sup: f64,
    #[arg(long, value_parser = unit_interval)]
    mu: f64,
    #[arg(long, value_parser = positive)]
    wgt_fct: f64,
    #[arg(long, value_parser = positive, default_value_t = 2.0)]
    lwes_factor: f64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write the final incremental state here.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Start from a saved state instead of mining `--init`.
    #[arg(long, conflicts_with = "init")]
    resume: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InFormat {
    SpmfSeq,
    SpmfItemset,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InFormat::SpmfSeq)]
    format: InFormat,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_parser = open_unit, default_value_t = 0.5)]
    prob_mean: f64,
    #[arg(long, value_parser = positive, default_value_t = 0.25)]
    prob_std: f64,
    #[arg(long, value_parser = open_unit, default_value_t = 0.5)]
    weight_mean: f64,
    #[arg(long, value_parser = positive, default_value_t = 0.125)]
    weight_std: f64,
    #[arg(long)]
    out_db: PathBuf,
    #[arg(long)]
    out_weights: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum BoundArg {
    Cap,
    Top,
    Both,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, value_delimiter = ',', required = true, value_parser = unit_interval)]
    min_sup_list: Vec<f64>,
    #[arg(long, value_parser = positive, default_value_t = 1.0)]
    wgt_fct: f64,
    #[arg(long, value_enum, default_value_t = BoundArg::Both)]
    bound: BoundArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    repeat: u32,
    /// Disable the parallel code paths.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.threads {
        set_threads(n);
    }
    let res = match cli.cmd {
        Cmd::Mine(a) => cmd_mine(&a),
        Cmd::Inc(a) => cmd_inc(&a),
        Cmd::Gen(a) => cmd_gen(&a),
        Cmd::Oracle(a) => cmd_oracle(&a),
        Cmd::Bench(a) => cmd_bench(&a),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::OracleGuard(_) => 3,
                Error::InvalidParam(_) => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) {
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_: usize) {}

fn write_file(path: &Path, body: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn emit_patterns(out: Option<&Path>, patterns: &[ScoredPattern], format: PatternFormat) -> Result<()> {
    let mut buf = Vec::new();
    dataio::format_patterns(&mut buf, patterns, format).expect("in-memory write");
    match out {
        Some(p) => write_file(p, &buf),
        None => io::stdout().write_all(&buf).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn load(db: &Path, weights: &Path) -> Result<(UncertainDatabase, WeightTable)> {
    Ok((dataio::parse_uncertain_db(db)?, dataio::parse_weights(weights)?))
}

fn cmd_mine(a: &MineArgs) -> Result<()> {
    let t0 = Instant::now();
    let (db, weights) = load(&a.db, &a.weights)?;
    let out = fuws_with(&db, &weights, a.min_sup * a.mu, a.wgt_fct, &FuwsOptions::default())?;
    emit_patterns(a.out.as_deref(), &out.patterns, a.format.into())?;
    if let Some(path) = &a.report {
        let (size, distinct, avg) = dataio::db_stats(&db);
        let th = Thresholds::new(a.min_sup, size, out.thresholds.wam, a.wgt_fct, a.mu);
        let body = format!(
            "command,min_sup,wgt_fct,mu,db_size,distinct_items,avg_length,candidates,false_positives,frequent,min_wes,min_wes_prime,preprocess_ms,grow_ms,filter_ms,total_ms\n\
             mine,{},{},{},{},{},{:.3},{},{},{},{:.6},{:.6},{:.3},{:.3},{:.3},{:.3}\n",
            a.min_sup,
            a.wgt_fct,
            a.mu,
            size,
            distinct,
            avg,
            out.candidates,
            out.false_positives,
            out.patterns.len(),
            th.min_wes,
            th.min_wes_prime,
            out.preprocess_ms,
            out.grow_ms,
            out.filter_ms,
            t0.elapsed().as_secs_f64() * 1e3
        );
        write_file(path, body.as_bytes())?;
    }
    Ok(())
}

fn cmd_oracle(a: &MineArgs) -> Result<()> {
    let (db, weights) = load(&a.db, &a.weights)?;
    let (_, wam) = crate::fuws::preprocess(&db, &weights)?;
    let min_wes = Thresholds::new(a.min_sup * a.mu, db.size(), wam, a.wgt_fct, 1.0).min_wes;
    let found = oracle_mine(&db, &weights, min_wes)?;
    emit_patterns(a.out.as_deref(), &found, a.format.into())
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let cfg = GenConfig {
        seed: a.seed,
        prob_mean: a.prob_mean,
        prob_std: a.prob_std,
        weight_mean: a.weight_mean,
        weight_std: a.weight_std,
    };
    let format = match a.format {
        InFormat::SpmfSeq => PreciseFormat::SpmfSeq,
        InFormat::SpmfItemset => PreciseFormat::SpmfItemset,
    };
    let (db, weights) = dataio::gen_uncertain(&a.input, format, &cfg)?;
    dataio::write_uncertain_db(&a.out_db, &db)?;
    dataio::write_weights(&a.out_weights, &weights)
}

fn cmd_inc(a: &IncArgs) -> Result<()> {
    let weights = dataio::parse_weights(&a.weights)?;
    let params = MiningParams::new(a.min_sup, a.wgt_fct, a.mu)?.with_lwes_factor(a.lwes_factor)?;
    let algo: Algo = a.algo.into();
    let deltas = a
        .delta
        .iter()
        .map(dataio::parse_uncertain_db)
        .collect::<Result<Vec<_>>>()?;

    // the baseline run doubles as the completeness reference
    let mut full: Option<UncertainDatabase> = None;
    let (mut stream, mut resumed, first) = if let Some(path) = &a.resume {
        if algo == Algo::Baseline {
            return Err(Error::InvalidParam("--resume needs an incremental algorithm".into()));
        }
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut st = IncrementalState::read_checkpoint(&text, &weights)?;
        st.params = params;
        (None, Some(st), None)
    } else {
        let init = dataio::parse_uncertain_db(a.init.as_ref().expect("clap enforces --init"))?;
        let (s, out) = Stream::start(algo, &init, &weights, params)?;
        full = Some(init);
        (Some(s), None, Some(out))
    };

    let mut rows = String::from("step,algo,db_size,min_wes,fs_count,sfs_count,pfs_count,completeness,ms\n");
    let mut record = |k: usize, fs: &[ScoredPattern], th: &Thresholds, sfs: usize, pfs: usize, ms: f64, full: Option<&UncertainDatabase>| -> Result<()> {
        let comp = match (full, algo) {
            (None, _) => String::new(),
            (Some(_), Algo::Baseline) => "1".into(),
            (Some(db), _) => {
                let base = fuws_with(db, &weights, a.min_sup, a.wgt_fct, &FuwsOptions::default())?;
                format!("{:.6}", completeness(fs, &base.patterns))
            }
        };
        rows.push_str(&format!(
            "{k},{algo},{},{:.6},{},{sfs},{pfs},{comp},{ms:.3}\n",
            th.db_size,
            th.min_wes,
            fs.len()
        ));
        let mut buf = Vec::new();
        dataio::format_patterns(&mut buf, fs, PatternFormat::Tsv).expect("in-memory write");
        write_file(&a.out_dir.join(format!("step_{k}.tsv")), &buf)
    };

    if let Some(o) = &first {
        record(0, &o.frequent, &o.thresholds, o.sfs_count, o.pfs_count, o.ms, full.as_ref())?;
    }
    for (i, delta) in deltas.iter().enumerate() {
        if let Some(db) = full.as_mut() {
            *db = db.concat(delta);
        }
        if let Some(s) = stream.as_mut() {
            let o = s.step(delta)?;
            record(i + 1, &o.frequent, &o.thresholds, o.sfs_count, o.pfs_count, o.ms, full.as_ref())?;
        } else if let Some(st) = resumed.as_mut() {
            let t0 = Instant::now();
            let fs = match algo {
                Algo::UwsInc => st.uwsinc_step(delta)?,
                _ => st.uwsincplus_step(delta)?,
            };
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            let sfs = st.seq_trie.len() - fs.len();
            record(i + 1, &fs, &st.thresholds(), sfs, st.pfs_trie.len(), ms, None)?;
        }
    }
    write_file(&a.out_dir.join("report.csv"), rows.as_bytes())?;

    if let Some(path) = &a.checkpoint {
        let st = resumed.as_ref().or_else(|| stream.as_ref().and_then(Stream::state));
        let Some(st) = st else {
            return Err(Error::InvalidParam("the baseline run has no state to checkpoint".into()));
        };
        let mut buf = Vec::new();
        st.write_checkpoint(&mut buf).expect("in-memory write");
        write_file(path, &buf)?;
    }
    Ok(())
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// One benchmark row.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub bound: Bound,
    pub min_sup: f64,
    pub candidates: usize,
    pub frequent: usize,
    pub false_pct: f64,
    pub ms: f64,
    pub patterns: Vec<ScoredPattern>,
}

/// Runs both bounds (or one) at every threshold; `ms` is the median of
/// `repeat` runs.
pub fn bench_rows(
    db: &UncertainDatabase,
    weights: &WeightTable,
    min_sups: &[f64],
    wgt_fct: f64,
    bounds: &[Bound],
    repeat: u32,
    parallel: bool,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &min_sup in min_sups {
        for &bound in bounds {
            let opts = FuwsOptions {
                bound,
                trace: false,
                parallel,
            };
            let mut times = Vec::new();
            let mut last = None;
            for _ in 0..repeat.max(1) {
                let t0 = Instant::now();
                let out = fuws_with(db, weights, min_sup, wgt_fct, &opts)?;
                times.push(t0.elapsed().as_secs_f64() * 1e3);
                last = Some(out);
            }
            let out = last.expect("at least one run");
            let false_pct = if out.candidates == 0 {
                0.0
            } else {
                100.0 * out.false_positives as f64 / out.candidates as f64
            };
            rows.push(BenchRow {
                bound,
                min_sup,
                candidates: out.candidates,
                frequent: out.patterns.len(),
                false_pct,
                ms: median(&mut times),
                patterns: out.patterns,
            });
        }
    }
    Ok(rows)
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let (db, weights) = load(&a.db, &a.weights)?;
    let bounds: &[Bound] = match a.bound {
        BoundArg::Cap => &[Bound::Cap],
        BoundArg::Top => &[Bound::Top],
        BoundArg::Both => &[Bound::Cap, Bound::Top],
    };
    let rows = bench_rows(&db, &weights, &a.min_sup_list, a.wgt_fct, bounds, a.repeat, !a.sequential)?;
    let mut body = String::from("bound,min_sup,candidates,frequent,false_pct,ms\n");
    for r in &rows {
        let name = match r.bound {
            Bound::Cap => "cap",
            Bound::Top => "top",
        };
        body.push_str(&format!(
            "{name},{},{},{},{:.3},{:.3}\n",
            r.min_sup, r.candidates, r.frequent, r.false_pct, r.ms
        ));
    }
    match &a.out {
        Some(p) => write_file(p, body.as_bytes()),
        None => io::stdout().write_all(body.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_parsers() {
        assert!(unit_interval("1.1").is_err());
        assert!(unit_interval("0").is_err());
        assert_eq!(unit_interval("1").unwrap(), 1.0);
        assert!(positive("0").is_err());
        assert!(open_unit("1").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["useqmine", "mine", "--db", "x", "--weights", "y", "--min-sup", "1.1", "--wgt-fct", "1"]), 2);
        assert_eq!(run(["useqmine", "frobnicate"]), 2);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
