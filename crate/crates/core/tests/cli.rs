use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use alignfluct::montecarlo::{EstimateReport, PValueReport};
use alignfluct::report::{from_json, parse_estimate_csv};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_alignfluct"));
    c.env_remove("ALIGNFLUCT_SEED").env_remove("ALIGNFLUCT_SELFTEST_CORRUPT");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const SMALL: &str = "
[alphabet]
letters = 0 1
[distribution]
probs = 0.2 0.8
[scoring]
matrix = id
gap_penalty = 6
[perturbation]
kind = single
from = 0
to = 1
multiplicity = 2
[run]
eps = 0.5
n = 120
replicates = 6
seed = 4
";

fn write_config(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

#[test]
fn estimate_json_and_seed_determinism() {
    let cfg = write_config("small.ini", SMALL);
    let cfg = cfg.to_str().unwrap();
    let a = run(&["estimate", "--config", cfg, "--seed", "7"]);
    let b = run(&["estimate", "--config", cfg, "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0), "{}", text(&a));
    assert_eq!(a.stdout, b.stdout);
    let rep: EstimateReport = from_json(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!(rep.config.master_seed, 7);
    assert_eq!(rep.replicates.len(), 6);
    let c = run(&["estimate", "--config", cfg, "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_environment_fallback() {
    let cfg = write_config("env.ini", SMALL);
    let out = bin()
        .args(["estimate", "--config", cfg.to_str().unwrap()])
        .env("ALIGNFLUCT_SEED", "99")
        .output()
        .unwrap();
    let rep: EstimateReport = from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(rep.config.master_seed, 99);
    let flag = bin()
        .args(["estimate", "--config", cfg.to_str().unwrap(), "--seed", "3"])
        .env("ALIGNFLUCT_SEED", "99")
        .output()
        .unwrap();
    let rep: EstimateReport = from_json(std::str::from_utf8(&flag.stdout).unwrap()).unwrap();
    assert_eq!(rep.config.master_seed, 3);
}

#[test]
fn estimate_csv_to_file() {
    let cfg = write_config("csv.ini", SMALL);
    let out = scratch("estimate.csv");
    let o = run(&[
        "estimate",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
        "--timings",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let body = std::fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("replicate,seed,L_S,L_SmT,x_r,wall_ms\n"));
    let rows = parse_estimate_csv(&body).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.wall_ms.is_some() && r.seed == 4));
}

#[test]
fn missing_matrix_file_is_a_config_error() {
    let cfg = write_config(
        "missing.ini",
        &SMALL.replace("matrix = id", "matrix = file\nfile = no_such_matrix.txt"),
    );
    let o = run(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("scoring.file"), "{}", text(&o));
}

#[test]
fn matrix_file_is_read_relative_to_config() {
    let m = scratch("id6.txt");
    std::fs::write(&m, "0 1\n1 0 -6\n0 1 -6\n-6 -6 *\n").unwrap();
    let cfg = write_config("file.ini", &SMALL.replace("matrix = id", "matrix = file\nfile = id6.txt"));
    let from_file = run(&["estimate", "--config", cfg.to_str().unwrap()]);
    let builtin = run(&["estimate", "--config", write_config("builtin.ini", SMALL).to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0), "{}", text(&from_file));
    assert_eq!(from_file.stdout, builtin.stdout);
}

#[test]
fn unknown_key_and_missing_config() {
    let cfg = write_config("unknown.ini", &format!("{SMALL}colour = blue\n"));
    let o = run(&["estimate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("run.colour"));
    let o = run(&["estimate", "--config", "/no/such/file.ini"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pvalue_zero_x_is_inconclusive() {
    let cfg = write_config("x0.ini", &format!("{SMALL}x = 0\n"));
    let o = run(&["pvalue", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(text(&o).contains("INCONCLUSIVE"));
    let rep: PValueReport = from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(rep.inconclusive && rep.delta < 0.0);
}

#[test]
fn pvalue_large_x_gives_small_bound() {
    let cfg = write_config(
        "bigx.ini",
        &std::fs::read_to_string(configs().join("case_two.ini"))
            .unwrap()
            .replace("x = 15.197", "x = 40"),
    );
    let o = run(&["pvalue", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let rep: PValueReport = from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert!(!rep.inconclusive);
    assert!(rep.bound < 1e-3, "{}", rep.bound);
    let t = text(&o);
    for key in ["c_n", "Delta", "norm_delta_S", "norm_delta_SmT"] {
        assert!(t.contains(key), "{key}");
    }
}

#[test]
fn pvalue_inline_estimate() {
    let cfg = write_config("inline.ini", SMALL);
    let o = run(&["pvalue", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict,"));
}

#[test]
fn pvalue_n_one_is_a_config_error() {
    let cfg = write_config("n1.ini", &(SMALL.replace("n = 120", "n = 1") + "x = 0.5\n"));
    let o = run(&["pvalue", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
}

#[test]
fn expected_change_guard_and_run() {
    let cfg = write_config("ec.ini", &SMALL.replace("n = 120", "n = 40"));
    let o = run(&["expected-change", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("replicate,seed,occurrences"));
    let big = write_config("ec_big.ini", &SMALL.replace("n = 120", "n = 25000"));
    let o = run(&["expected-change", "--config", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("exact_change_cap"));
}

#[test]
fn varscan_csv() {
    let cfg = write_config("vs.ini", &format!("{SMALL}n_list = 30 60\n"));
    let o = run(&["varscan", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let body = String::from_utf8_lossy(&o.stdout);
    assert_eq!(body.lines().count(), 3);
    assert!(text(&o).contains("recommended"));
    let none = write_config("vs_none.ini", SMALL);
    assert_eq!(run(&["varscan", "--config", none.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn align_exports_pairs() {
    let cfg = write_config("align.ini", SMALL);
    let o = run(&["align", "--config", cfg.to_str().unwrap(), "--x", "0110", "--y", "0110"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout), "1\t1\n2\t2\n3\t3\n4\t4\n");
    assert!(text(&o).contains("score = 4"));
    let o = run(&["align", "--config", cfg.to_str().unwrap(), "--x", "012", "--y", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_passes_and_fault_hook_fails() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("properties passed"), "{out}");
    let o = bin()
        .arg("selftest")
        .env("ALIGNFLUCT_SELFTEST_CORRUPT", "blastz")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("property failed: T_BLASTZ reproduction"));
}

#[test]
fn shipped_configs_parse() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "ini") {
            alignfluct::config::FileConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        }
    }
}
