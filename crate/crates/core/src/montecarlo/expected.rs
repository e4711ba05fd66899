use serde::{Deserialize, Serialize};

use super::{replicate_rng, run_units, timed, ExperimentConfig, RunOptions, Summary};
use crate::alignment::{alignment_score, optimal_alignment_capped, optimal_score};
use crate::error::{Error, Result};
use crate::perturbation::{exact_expected_change_capped, DEFAULT_EXACT_CHANGE_CAP};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedChangeRecord {
    pub replicate: usize,
    pub stream: u64,
    /// Candidate occurrences in both strings.
    pub occurrences: usize,
    /// `E[L~_n(S) - L_n(S) | X, Y]`.
    pub exact_change: f64,
    /// `T_pi / (N * multiplicity)` for the traceback-optimal `pi`.
    pub t_lower_bound: f64,
    /// `(L_n(S) - L_n(S - eps T)) / n` on the same pair.
    pub x: f64,
    /// `n x / (eps N multiplicity)`, the weakest link of the chain.
    pub chain_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedChangeReport {
    pub config: ExperimentConfig,
    pub records: Vec<ExpectedChangeRecord>,
    pub summary: Summary,
    pub x_summary: Summary,
    /// `p_a` for a single change, `2 sum p` over the from set for a group change.
    pub p_hat: f64,
    /// `mean(x) / (multiplicity eps p_hat)`: the asymptotic level the
    /// expected change is pushed above when `lambda(S) > lambda(S - eps T)`.
    pub theorem_target: f64,
    /// Replicates where `exact_change < t_lower_bound` or
    /// `t_lower_bound < chain_bound`; zero whenever the arithmetic is exact.
    pub chain_violations: usize,
}

/// Per replicate: sample a pair, compute the exact conditional expected change
/// of the optimal score under one random letter change, together with the
/// lower bounds it must dominate.
pub fn expected_change_mc(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExpectedChangeReport> {
    expected_change_mc_capped(cfg, opts, DEFAULT_EXACT_CHANGE_CAP)
}

pub fn expected_change_mc_capped(
    cfg: &ExperimentConfig,
    opts: RunOptions,
    cap: usize,
) -> Result<ExpectedChangeReport> {
    cfg.validate()?;
    if cfg.n > cap {
        return Err(Error::SizeCap { len: cfg.n, cap });
    }
    let (t, smt) = cfg.derived_matrices()?;
    let mult = cfg.perturbation.multiplicity() as i64;
    let records = run_units(cfg.replicates, opts, |r| {
        let (rec, wall) = timed(opts.record_timings, || {
            let mut rng = replicate_rng(cfg.master_seed, r as u64);
            let x = cfg.distribution.sample(cfg.n, &mut rng);
            let y = cfg.distribution.sample(cfg.n, &mut rng);
            let occurrences = cfg.perturbation.occurrences(&x, &y).len();
            let exact = exact_expected_change_capped(&x, &y, &cfg.perturbation, &cfg.scoring, cap)?;
            let opt = optimal_alignment_capped(&x, &y, &cfg.scoring, cap)?;
            let lower = alignment_score(&x, &y, &opt.alignment, &t)?.div_int(occurrences as i64 * mult);
            let diff = opt.score - optimal_score(&x, &y, &smt)?;
            let stat = diff.div_int(cfg.n as i64);
            let chain = if cfg.eps > 0.0 {
                diff.div_real(cfg.eps).div_int(occurrences as i64 * mult)
            } else {
                lower
            };
            let violated = exact < lower || lower < chain;
            Ok((
                ExpectedChangeRecord {
                    replicate: r,
                    stream: r as u64,
                    occurrences,
                    exact_change: exact.to_f64(),
                    t_lower_bound: lower.to_f64(),
                    x: stat.to_f64(),
                    chain_bound: chain.to_f64(),
                    wall_ms: None,
                },
                violated,
            ))
        })?;
        Ok((ExpectedChangeRecord { wall_ms: wall, ..rec.0 }, rec.1))
    })?;
    let chain_violations = records.iter().filter(|(_, v)| *v).count();
    let records: Vec<ExpectedChangeRecord> = records.into_iter().map(|(r, _)| r).collect();
    let changes: Vec<f64> = records.iter().map(|r| r.exact_change).collect();
    let xs: Vec<f64> = records.iter().map(|r| r.x).collect();
    let x_summary = Summary::of(&xs);
    let p_hat = cfg.perturbation.normalising_probability(cfg.distribution.probs());
    let theorem_target = if cfg.eps > 0.0 && p_hat > 0.0 {
        x_summary.mean / (mult as f64 * cfg.eps * p_hat)
    } else {
        0.0
    };
    Ok(ExpectedChangeReport {
        config: cfg.clone(),
        summary: Summary::of(&changes),
        x_summary,
        p_hat,
        theorem_target,
        chain_violations,
        records,
    })
}
