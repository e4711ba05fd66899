use serde::{Deserialize, Serialize};

use super::{replicate_rng, run_units, timed, ExperimentConfig, RunOptions, Summary};
use crate::alignment::optimal_score;
use crate::error::Result;
use crate::model::{Score, ScoringMatrix};

use super::diagnostics::EventReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    /// ChaCha stream of this replicate under the master seed.
    pub stream: u64,
    pub l_s: f64,
    pub l_smt: f64,
    /// `(L_n(S) - L_n(S - eps T)) / n`, computed exactly before rounding.
    pub x: f64,
    /// Letters of the change set in `X` alone and in both strings.
    pub from_count_x: usize,
    pub from_count_total: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub config: ExperimentConfig,
    pub t_matrix: ScoringMatrix,
    pub smt_matrix: ScoringMatrix,
    pub replicates: Vec<ReplicateRecord>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<EventReport>,
}

impl EstimateReport {
    pub fn x_values(&self) -> Vec<f64> {
        self.replicates.iter().map(|r| r.x).collect()
    }
}

/// The test statistic `x_r = (L_n(S) - L_n(S - eps T)) / n`, both scores
/// computed on the same sampled pair, once per replicate.
pub fn run_statistic(cfg: &ExperimentConfig, opts: RunOptions) -> Result<EstimateReport> {
    cfg.validate()?;
    let (t, smt) = cfg.derived_matrices()?;
    let records = run_units(cfg.replicates, opts, |r| {
        let (rec, wall) = timed(opts.record_timings, || {
            let mut rng = replicate_rng(cfg.master_seed, r as u64);
            let x = cfg.distribution.sample(cfg.n, &mut rng);
            let y = cfg.distribution.sample(cfg.n, &mut rng);
            let l_s = optimal_score(&x, &y, &cfg.scoring)?;
            let l_smt = optimal_score(&x, &y, &smt)?;
            let stat: Score = (l_s - l_smt).div_int(cfg.n as i64);
            let from_count_x = cfg.perturbation.count_occurrences(&x);
            Ok(ReplicateRecord {
                replicate: r,
                stream: r as u64,
                l_s: l_s.to_f64(),
                l_smt: l_smt.to_f64(),
                x: stat.to_f64(),
                from_count_x,
                from_count_total: from_count_x + cfg.perturbation.count_occurrences(&y),
                wall_ms: None,
            })
        })?;
        Ok(ReplicateRecord { wall_ms: wall, ..rec })
    })?;
    let xs: Vec<f64> = records.iter().map(|r| r.x).collect();
    Ok(EstimateReport {
        config: cfg.clone(),
        t_matrix: t,
        smt_matrix: smt,
        summary: Summary::of(&xs),
        replicates: records,
        events: None,
    })
}
