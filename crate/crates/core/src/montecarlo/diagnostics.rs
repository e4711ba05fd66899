//! Empirical checks of the concentration events and of McDiarmid's inequality.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::statistic::EstimateReport;
use super::{replicate_rng, run_units, ExperimentConfig, RunOptions};
use crate::alignment::optimal_score;
use crate::error::{Error, Result};
use crate::model::Score;

/// Reference values for `lambda(S)` and `lambda(S - eps T)` supplied by the
/// user; nothing here claims they are the true limits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaReferences {
    pub lambda_s: f64,
    pub lambda_smt: f64,
    /// Slack multiplier of the letter-count event.
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventFlags {
    /// `L_n(S) / n >= lambda(S) - ln n / sqrt n`
    pub a: bool,
    /// `L_n(S - eps T) / n <= lambda(S - eps T) + ln n / sqrt n`
    pub b: bool,
    /// `N_a / n <= p_a + delta ln n / sqrt n`, `N_a` counted in `X`
    pub c: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub references: LambdaReferences,
    pub flags: Vec<EventFlags>,
    pub freq_a: f64,
    pub freq_b: f64,
    pub freq_c: f64,
    pub freq_all: f64,
}

/// Evaluate the events per replicate of an estimate run.
pub fn evaluate_events(report: &EstimateReport, refs: LambdaReferences) -> Result<EventReport> {
    let cfg = &report.config;
    if cfg.n < 2 {
        return Err(Error::Precondition("events need n >= 2".into()));
    }
    let n = cfg.n as f64;
    let slack = n.ln() / n.sqrt();
    let p_a: f64 = cfg
        .perturbation
        .from_set()
        .iter()
        .map(|&s| cfg.distribution.prob(s))
        .sum();
    let flags: Vec<EventFlags> = report
        .replicates
        .iter()
        .map(|r| EventFlags {
            a: r.l_s / n >= refs.lambda_s - slack,
            b: r.l_smt / n <= refs.lambda_smt + slack,
            c: r.from_count_x as f64 / n <= p_a + refs.delta * slack,
        })
        .collect();
    let freq = |f: &dyn Fn(&EventFlags) -> bool| {
        flags.iter().filter(|e| f(e)).count() as f64 / flags.len().max(1) as f64
    };
    Ok(EventReport {
        references: refs,
        freq_a: freq(&|e| e.a),
        freq_b: freq(&|e| e.b),
        freq_c: freq(&|e| e.c),
        freq_all: freq(&|e| e.a && e.b && e.c),
        flags,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub eps: f64,
    /// `eps * m` with `m = 2n` letters.
    pub deviation: f64,
    pub freq_upper: f64,
    pub freq_lower: f64,
    /// `exp(-2 eps^2 m / C^2)`
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McDiarmidReport {
    pub n: usize,
    pub trials: usize,
    /// Bounded-difference constant `C = ||S||_delta`.
    pub c_bound: f64,
    pub max_change: f64,
    /// Single-letter resamplings that moved `L_n(S)` by more than `C`.
    pub violations: usize,
    pub mean_score: f64,
    pub tails: Vec<TailRow>,
}

impl McDiarmidReport {
    pub fn tails_within_bound(&self) -> bool {
        self.tails
            .iter()
            .all(|t| t.freq_upper <= t.bound && t.freq_lower <= t.bound)
    }
}

/// Resample one uniformly chosen letter of a fresh pair per trial and record
/// how far `L_n(S)` moves; then compare the empirical tails of `L_n(S)` at
/// deviations `eps * 2n` with McDiarmid's bound. The trial mean stands in for
/// `E[L_n(S)]`.
pub fn mcdiarmid_check(
    cfg: &ExperimentConfig,
    trials: usize,
    tail_eps: &[f64],
    opts: RunOptions,
) -> Result<McDiarmidReport> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is needed".into()));
    }
    let c = cfg.scoring.norm_delta();
    let n = cfg.n;
    let results = run_units(trials, opts, |t| {
        let mut rng = replicate_rng(cfg.master_seed, t as u64);
        let mut x = cfg.distribution.sample(n, &mut rng);
        let mut y = cfg.distribution.sample(n, &mut rng);
        let before = optimal_score(&x, &y, &cfg.scoring)?;
        let pos = rng.random_range(0..2 * n);
        let fresh = cfg.distribution.sample(1, &mut rng)[0];
        if pos < n {
            x[pos] = fresh;
        } else {
            y[pos - n] = fresh;
        }
        let after = optimal_score(&x, &y, &cfg.scoring)?;
        Ok::<(Score, Score), Error>((before, (after - before).abs()))
    })?;
    let violations = results.iter().filter(|(_, d)| *d > c).count();
    let max_change = results
        .iter()
        .map(|(_, d)| *d)
        .fold(Score::ZERO, Score::max)
        .to_f64();
    let scores: Vec<f64> = results.iter().map(|(s, _)| s.to_f64()).collect();
    let mean = scores.iter().sum::<f64>() / trials as f64;
    let m = 2.0 * n as f64;
    let cf = c.to_f64();
    let tails = tail_eps
        .iter()
        .map(|&e| {
            let dev = e * m;
            let count = |f: &dyn Fn(f64) -> bool| scores.iter().filter(|&&s| f(s)).count() as f64 / trials as f64;
            TailRow {
                eps: e,
                deviation: dev,
                freq_upper: count(&|s| s - mean >= dev),
                freq_lower: count(&|s| mean - s >= dev),
                bound: if cf > 0.0 { (-2.0 * e * e * m / (cf * cf)).exp() } else { 0.0 },
            }
        })
        .collect();
    Ok(McDiarmidReport {
        n,
        trials,
        c_bound: cf,
        max_change,
        violations,
        mean_score: mean,
        tails,
    })
}
