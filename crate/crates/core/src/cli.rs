//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alignment::{optimal_alignment_capped, DEFAULT_TRACEBACK_CAP};
use crate::config::{FileConfig, SCORE_ONLY_MAX_N};
use crate::error::{Error, Result};
use crate::montecarlo::{
    evaluate_events, expected_change_mc_capped, pvalue_bound, run_statistic, variance_scan, PValueReport,
    RunOptions,
};
use crate::report;
use crate::selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "alignfluct", version, about = "Monte Carlo tests for optimal alignment score fluctuations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the test statistic x = (L_n(S) - L_n(S - eps T)) / n.
    Estimate(RunArgs),
    /// Bound the false-positive probability of an observed x.
    Pvalue(RunArgs),
    /// Exact conditional expected change of L_n(S) under one random letter change.
    ExpectedChange(RunArgs),
    /// Sample variance of L_n(S) over the lengths in run.n_list.
    Varscan(RunArgs),
    /// Run the built-in property checks.
    Selftest,
    /// Align two strings and print the score and the aligned index pairs.
    Align(AlignArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides ALIGNFLUCT_SEED and run.seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record per-replicate wall time.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct AlignArgs {
    /// Experiment file; only its alphabet and scoring are used.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Estimate(a) => estimate(&a),
        Command::Pvalue(a) => pvalue(&a),
        Command::ExpectedChange(a) => expected_change(&a),
        Command::Varscan(a) => varscan(&a),
        Command::Selftest => {
            let r = selftest::run();
            print!("{}", r.table());
            Ok(if r.passed() { EXIT_OK } else { EXIT_SELFTEST })
        }
        Command::Align(a) => align(&a),
    }
}

struct Prepared {
    file: FileConfig,
    opts: RunOptions,
}

fn prepare(a: &RunArgs) -> Result<Prepared> {
    let mut file = FileConfig::load(&a.config)?;
    file.resolve_seed(a.seed)?;
    let workers = a.workers.or(file.workers).unwrap_or(1);
    if workers == 0 {
        return Err(Error::config("--workers", "must be at least 1"));
    }
    Ok(Prepared {
        file,
        opts: RunOptions {
            workers,
            record_timings: a.timings,
        },
    })
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

/// Human summary: stdout when the report goes to a file, stderr otherwise.
fn note(out: &Option<PathBuf>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn estimate(a: &RunArgs) -> Result<i32> {
    let p = prepare(a)?;
    let mut rep = run_statistic(&p.file.experiment, p.opts)?;
    if let Some(refs) = p.file.events {
        rep.events = Some(evaluate_events(&rep, refs)?);
    }
    let body = match a.format {
        Format::Json => report::to_json(&rep)?,
        Format::Csv => report::estimate_csv(&rep)?,
    };
    emit(&a.out, &body)?;
    let s = &rep.summary;
    note(
        &a.out,
        &format!(
            "n = {}, replicates = {}, mean x = {}, std dev = {}",
            p.file.experiment.n,
            s.count,
            report::fmt_f64(s.mean),
            s.std_dev.map(report::fmt_f64).unwrap_or_else(|| "undefined".into())
        ),
    );
    Ok(EXIT_OK)
}

fn pvalue(a: &RunArgs) -> Result<i32> {
    let p = prepare(a)?;
    let cfg = &p.file.experiment;
    if cfg.n < 2 {
        return Err(Error::config("run.n", "c_n is undefined for n < 2"));
    }
    let x = match p.file.x {
        Some(x) => x,
        None => run_statistic(cfg, p.opts)?.summary.mean,
    };
    let (t, _) = cfg.derived_matrices()?;
    let mut rep: PValueReport = pvalue_bound(x, cfg.n as u64, &cfg.scoring, cfg.eps, &t)?;
    if let Some(pv) = p.file.reference_pvalue {
        rep.compare_with(pv)?;
    }
    let body = match a.format {
        Format::Json => report::to_json(&rep)?,
        Format::Csv => pvalue_csv(&rep),
    };
    emit(&a.out, &body)?;
    note(&a.out, &pvalue_text(&rep));
    Ok(EXIT_OK)
}

fn pvalue_rows(r: &PValueReport) -> Vec<(&'static str, f64)> {
    let mut rows = vec![
        ("x", r.x),
        ("n", r.n as f64),
        ("eps", r.eps),
        ("c_n", r.c_n),
        ("norm_delta_S", r.norm_delta_s),
        ("norm_delta_SmT", r.norm_delta_smt),
        ("norm_sum", r.norm_sum),
        ("margin", r.margin),
        ("Delta", r.delta),
        ("log_bound", r.log_bound),
        ("bound", r.bound),
    ];
    if let Some(c) = &r.reference {
        rows.extend([
            ("reference_pvalue", c.pvalue),
            ("implied_Delta", c.implied_delta),
            ("implied_x", c.implied_x),
            ("bound_over_reference", c.ratio),
        ]);
    }
    rows
}

fn pvalue_csv(r: &PValueReport) -> String {
    let mut s = String::from("quantity,value\n");
    for (k, v) in pvalue_rows(r) {
        s += &format!("{k},{}\n", report::fmt_f64(v));
    }
    s += &format!("verdict,{}\n", r.verdict());
    s
}

fn pvalue_text(r: &PValueReport) -> String {
    let mut s = String::new();
    for (k, v) in pvalue_rows(r) {
        s += &format!("{k:>20} = {v:.6e}\n");
    }
    s += r.verdict();
    s
}

fn expected_change(a: &RunArgs) -> Result<i32> {
    let p = prepare(a)?;
    let cap = p.file.exact_change_cap;
    if p.file.experiment.n > cap {
        return Err(Error::config(
            "run.n",
            format!(
                "n = {} needs a traceback and re-runs the DP per occurrence; \
                 lower n or raise run.exact_change_cap (currently {cap}, at most {DEFAULT_TRACEBACK_CAP})",
                p.file.experiment.n
            ),
        ));
    }
    let rep = expected_change_mc_capped(&p.file.experiment, p.opts, cap)?;
    let body = match a.format {
        Format::Json => report::to_json(&rep)?,
        Format::Csv => report::expected_change_csv(&rep)?,
    };
    emit(&a.out, &body)?;
    note(
        &a.out,
        &format!(
            "mean expected change = {}, theorem target = {}, chain violations = {}",
            report::fmt_f64(rep.summary.mean),
            report::fmt_f64(rep.theorem_target),
            rep.chain_violations
        ),
    );
    Ok(EXIT_OK)
}

fn varscan(a: &RunArgs) -> Result<i32> {
    let p = prepare(a)?;
    let n_list = &p.file.n_list;
    if n_list.is_empty() {
        return Err(Error::config("run.n_list", "required for varscan"));
    }
    if let Some(&big) = n_list.iter().find(|&&n| n > SCORE_ONLY_MAX_N) {
        return Err(Error::config(
            "run.n_list",
            format!("n = {big} exceeds the score-only limit of {SCORE_ONLY_MAX_N}"),
        ));
    }
    let rep = variance_scan(&p.file.experiment, n_list, p.file.experiment.replicates, p.opts)?;
    let body = match a.format {
        Format::Json => report::to_json(&rep)?,
        Format::Csv => report::variance_csv(&rep)?,
    };
    emit(&a.out, &body)?;
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(r) = rep.max_ratio_to_median() {
        note(&a.out, &format!("largest variance/n ratio to the median: {r:.4}"));
    }
    Ok(EXIT_OK)
}

fn align(a: &AlignArgs) -> Result<i32> {
    let file = FileConfig::load(&a.config)?;
    let s = &file.experiment.scoring;
    let alphabet = s.alphabet();
    let x = alphabet.encode(&a.x).map_err(|e| Error::config("--x", e.to_string()))?;
    let y = alphabet.encode(&a.y).map_err(|e| Error::config("--y", e.to_string()))?;
    let longest = x.len().max(y.len());
    if longest > DEFAULT_TRACEBACK_CAP {
        return Err(Error::config(
            "--x",
            format!("tracebacks are limited to length {DEFAULT_TRACEBACK_CAP}"),
        ));
    }
    let r = optimal_alignment_capped(&x, &y, s, DEFAULT_TRACEBACK_CAP)?;
    emit(&a.out, &r.alignment.to_tsv())?;
    note(&a.out, &format!("score = {}", r.score));
    Ok(EXIT_OK)
}
