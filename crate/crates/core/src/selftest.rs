//! Built-in property checks run by `alignfluct selftest`.
//!
//! Setting `ALIGNFLUCT_SELFTEST_CORRUPT=blastz` perturbs the BLASTZ table fed
//! to the T reproduction check, which must then fail.

use std::time::Instant;

use rand::Rng;

use crate::alignment::{alignment_score, brute_force_score, optimal_alignment, optimal_score, pair_counts};
use crate::model::{Alphabet, LetterDistribution, Score, ScoringMatrix, Symbol, BLASTZ_SCORES};
use crate::montecarlo::{c_n_constant, replicate_rng, run_statistic, ExperimentConfig, RunOptions};
use crate::perturbation::{
    build_group_change_t, build_single_letter_t, exact_expected_change, t_lower_bound, PerturbationSpec,
};
use crate::report::to_json;

pub const CORRUPT_ENV: &str = "ALIGNFLUCT_SELFTEST_CORRUPT";

const SEED: u64 = 0x5e1f_7e57;

#[derive(Clone, Debug)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: usize,
    pub millis: f64,
    pub failure: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub results: Vec<PropertyResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.failure.is_none())
    }

    pub fn first_failure(&self) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.failure.is_some())
    }

    pub fn table(&self) -> String {
        let width = self.results.iter().map(|r| r.name.len()).max().unwrap_or(8);
        let mut out = format!("{:<width$}  {:>7}  {:>9}  status\n", "property", "cases", "ms");
        for r in &self.results {
            let status = match &r.failure {
                None => "ok".to_string(),
                Some(m) => format!("FAILED: {m}"),
            };
            out += &format!("{:<width$}  {:>7}  {:>9.1}  {status}\n", r.name, r.cases, r.millis);
        }
        match self.first_failure() {
            None => out += &format!("all {} properties passed\n", self.results.len()),
            Some(f) => out += &format!("property failed: {}\n", f.name),
        }
        out
    }
}

type Check = fn() -> Result<usize, String>;

const PROPERTIES: &[(&str, Check)] = &[
    ("DP vs brute force, binary exhaustive", dp_vs_brute_binary),
    ("DP vs brute force, random DNA", dp_vs_brute_dna),
    ("T_BLASTZ reproduction", t_blastz_reproduction),
    ("T_2 reproduction", t2_reproduction),
    ("Q identity", q_identity),
    ("inequality chain", inequality_chain),
    ("replacement bound", replacement_bound),
    ("extension bound", extension_bound),
    ("c_n constant", c_n_values),
    ("worker-count determinism", determinism),
];

pub fn run() -> SelftestReport {
    let results = PROPERTIES
        .iter()
        .map(|&(name, check)| {
            let start = Instant::now();
            let outcome = check();
            let millis = start.elapsed().as_secs_f64() * 1e3;
            match outcome {
                Ok(cases) => PropertyResult { name, cases, millis, failure: None },
                Err(m) => PropertyResult { name, cases: 0, millis, failure: Some(m) },
            }
        })
        .collect();
    SelftestReport { results }
}

fn all_strings(k: u8, max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for c in 0..k {
                let mut t: Vec<Symbol> = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn binary_matrices() -> Vec<ScoringMatrix> {
    let b = Alphabet::binary();
    vec![
        ScoringMatrix::identity_binary(6.0),
        ScoringMatrix::match_mismatch(b.clone(), 1.0, -1.0, 1.0).unwrap(),
        ScoringMatrix::from_blocks(b, &[vec![3.0, -0.5], vec![-0.5, 1.25]], &[-2.0, -0.75]).unwrap(),
    ]
}

fn err<T: std::fmt::Debug>(e: T) -> String {
    format!("{e:?}")
}

fn dp_vs_brute_binary() -> Result<usize, String> {
    let strings = all_strings(2, 4);
    let mut cases = 0;
    for s in binary_matrices() {
        for x in &strings {
            for y in &strings {
                let dp = optimal_score(x, y, &s).map_err(err)?;
                let bf = brute_force_score(x, y, &s).map_err(err)?;
                if dp != bf {
                    return Err(format!("x={x:?} y={y:?}: dp {dp} vs brute force {bf}"));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn dp_vs_brute_dna() -> Result<usize, String> {
    let s = ScoringMatrix::blastz(400.0);
    let mut rng = replicate_rng(SEED, 1);
    for case in 0..300 {
        let lx = rng.random_range(0..=6);
        let ly = rng.random_range(0..=6);
        let x: Vec<Symbol> = (0..lx).map(|_| rng.random_range(0..4)).collect();
        let y: Vec<Symbol> = (0..ly).map(|_| rng.random_range(0..4)).collect();
        let dp = optimal_score(&x, &y, &s).map_err(err)?;
        let bf = brute_force_score(&x, &y, &s).map_err(err)?;
        if dp != bf {
            return Err(format!("case {case}: dp {dp} vs brute force {bf}"));
        }
    }
    Ok(300)
}

fn t_blastz_reproduction() -> Result<usize, String> {
    let mut table = BLASTZ_SCORES;
    if std::env::var(CORRUPT_ENV).is_ok_and(|v| v == "blastz") {
        table[2][3] += 1.0;
    }
    let block: Vec<Vec<f64>> = table.iter().map(|r| r.to_vec()).collect();
    let s = ScoringMatrix::from_blocks(Alphabet::dna(), &block, &[-1200.0; 4]).map_err(err)?;
    let t = build_group_change_t(&s, &['C', 'G'], &['A', 'T']).map_err(err)?;
    // rows and columns A, T, C, G
    let expect = [
        [0.0, 0.0, 144.0, 153.0],
        [0.0, 0.0, 159.5, 148.5],
        [144.0, 159.5, -439.0, -176.0],
        [153.0, 148.5, -176.0, -419.0],
    ];
    for (i, row) in expect.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            let got = t.score(i as Symbol, j as Symbol);
            if got != Score::from_units((2.0 * e) as i64, 2) {
                return Err(format!("entry ({i}, {j}) is {got}, expected {e}"));
            }
        }
        if t.gap_score(i as Symbol) != 0.0 {
            return Err(format!("gap entry of letter {i} is not zero"));
        }
    }
    Ok(20)
}

fn t2_reproduction() -> Result<usize, String> {
    let t = build_single_letter_t(&ScoringMatrix::identity_binary(6.0), '0', '1', 2).map_err(err)?;
    let expect = [[-4, 2], [2, 0]];
    for i in 0..2u8 {
        for j in 0..2u8 {
            let want = Score::from_int(expect[i as usize][j as usize]);
            if t.score(i, j) != want {
                return Err(format!("entry ({i}, {j}) is {}, expected {want}", t.score(i, j)));
            }
        }
        if t.gap_score(i) != 0.0 {
            return Err(format!("gap entry of letter {i} is not zero"));
        }
    }
    Ok(6)
}

fn case_one(n: usize, replicates: usize) -> ExperimentConfig {
    let alphabet = Alphabet::binary();
    ExperimentConfig {
        distribution: LetterDistribution::new(&alphabet, vec![0.2, 0.8]).unwrap(),
        scoring: ScoringMatrix::identity_binary(6.0),
        perturbation: PerturbationSpec::single(&alphabet, '0', '1', 2).unwrap(),
        alphabet,
        eps: 0.5,
        n,
        replicates,
        master_seed: SEED,
    }
}

fn q_identity() -> Result<usize, String> {
    let s = ScoringMatrix::blastz(1200.0);
    let d = LetterDistribution::new(s.alphabet(), vec![0.4, 0.4, 0.1, 0.1]).unwrap();
    let mut rng = replicate_rng(SEED, 2);
    for case in 0..100 {
        let x = d.sample(rng.random_range(0..40), &mut rng);
        let y = d.sample(rng.random_range(0..40), &mut rng);
        let r = optimal_alignment(&x, &y, &s).map_err(err)?;
        let direct = alignment_score(&x, &y, &r.alignment, &s).map_err(err)?;
        let q = pair_counts(&x, &y, &r.alignment, s.alphabet()).map_err(err)?;
        let via_q = q.contract(&s).map_err(err)?;
        if direct != r.score || via_q != r.score {
            return Err(format!("case {case}: dp {} direct {direct} <Q,S> {via_q}", r.score));
        }
    }
    Ok(100)
}

fn inequality_chain() -> Result<usize, String> {
    let cfg = case_one(30, 1);
    let (t, smt) = cfg.derived_matrices().map_err(err)?;
    let mut checked = 0;
    for r in 0..200 {
        let mut rng = replicate_rng(SEED, 100 + r);
        let x = cfg.distribution.sample(cfg.n, &mut rng);
        let y = cfg.distribution.sample(cfg.n, &mut rng);
        if cfg.perturbation.occurrences(&x, &y).is_empty() {
            continue;
        }
        let exact = exact_expected_change(&x, &y, &cfg.perturbation, &cfg.scoring).map_err(err)?;
        let lower = t_lower_bound(&x, &y, &t, &cfg.scoring, &cfg.perturbation).map_err(err)?;
        if exact < lower {
            return Err(format!("replicate {r}: expected change {exact} < T_pi/N {lower}"));
        }
        let pi = optimal_alignment(&x, &y, &cfg.scoring).map_err(err)?;
        let t_pi = alignment_score(&x, &y, &pi.alignment, &t).map_err(err)?;
        let gap = pi.score - optimal_score(&x, &y, &smt).map_err(err)?;
        if t_pi.mul_real(cfg.eps) < gap {
            return Err(format!("replicate {r}: eps T_pi {} < L(S) - L(S - eps T) {gap}", t_pi.mul_real(cfg.eps)));
        }
        checked += 1;
    }
    Ok(checked)
}

fn random_pairs(stream: u64, count: usize) -> Vec<(Vec<Symbol>, Vec<Symbol>)> {
    let mut rng = replicate_rng(SEED, stream);
    (0..count)
        .map(|_| {
            let lx = rng.random_range(1..25);
            let ly = rng.random_range(1..25);
            (
                (0..lx).map(|_| rng.random_range(0..4)).collect(),
                (0..ly).map(|_| rng.random_range(0..4)).collect(),
            )
        })
        .collect()
}

fn replacement_bound() -> Result<usize, String> {
    let s = ScoringMatrix::blastz(1200.0);
    let bound = s.norm_delta();
    let mut cases = 0;
    for (x, y) in random_pairs(3, 40) {
        let base = optimal_score(&x, &y, &s).map_err(err)?;
        for pos in 0..x.len() {
            for c in 0..4 {
                let mut x2 = x.clone();
                x2[pos] = c;
                let d = (optimal_score(&x2, &y, &s).map_err(err)? - base).abs();
                if d > bound {
                    return Err(format!("change {d} exceeds ||S||_delta = {bound}"));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn extension_bound() -> Result<usize, String> {
    let s = ScoringMatrix::blastz(1200.0);
    // cropping the appended column can leave a letter of y against a gap, so
    // ||S||_inf alone does not bound the change
    let bound = s.norm_inf().max(s.norm_delta());
    let mut cases = 0;
    for (x, y) in random_pairs(4, 60) {
        let base = optimal_score(&x, &y, &s).map_err(err)?;
        for c in 0..4 {
            for front in [false, true] {
                let mut x2 = x.clone();
                if front {
                    x2.insert(0, c);
                } else {
                    x2.push(c);
                }
                let d = (optimal_score(&x2, &y, &s).map_err(err)? - base).abs();
                if d > bound {
                    return Err(format!("change {d} exceeds max(||S||_inf, ||S||_delta) = {bound}"));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

fn c_n_values() -> Result<usize, String> {
    let c = c_n_constant(100_000).map_err(err)?;
    if (c - 1.4802).abs() > 1e-4 {
        return Err(format!("c_n(1e5) = {c}"));
    }
    if c_n_constant(1).is_ok() {
        return Err("c_n(1) should be undefined".into());
    }
    Ok(2)
}

fn determinism() -> Result<usize, String> {
    let cfg = case_one(80, 8);
    let one = run_statistic(&cfg, RunOptions { workers: 1, record_timings: false }).map_err(err)?;
    let four = run_statistic(&cfg, RunOptions { workers: 4, record_timings: false }).map_err(err)?;
    if to_json(&one).map_err(err)? != to_json(&four).map_err(err)? {
        return Err("reports differ between 1 and 4 workers".into());
    }
    Ok(2)
}
