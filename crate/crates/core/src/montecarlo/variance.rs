use serde::{Deserialize, Serialize};

use super::{replicate_rng, run_units, ExperimentConfig, RunOptions};
use crate::alignment::optimal_score;
use crate::error::{Error, Result};

pub const MIN_RECOMMENDED_REPLICATES: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub n: usize,
    pub replicates: usize,
    pub mean: f64,
    /// Unbiased sample variance of `L_n(S)`; `None` with fewer than two replicates.
    pub variance: Option<f64>,
    pub variance_over_n: Option<f64>,
}

impl VarianceRow {
    pub fn flagged(&self) -> bool {
        self.variance.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceScanReport {
    pub config: ExperimentConfig,
    pub rows: Vec<VarianceRow>,
    pub warnings: Vec<String>,
}

impl VarianceScanReport {
    /// Largest `(variance / n) / median(variance / n)` or its inverse.
    pub fn max_ratio_to_median(&self) -> Option<f64> {
        let mut ratios: Vec<f64> = self.rows.iter().filter_map(|r| r.variance_over_n).collect();
        if ratios.is_empty() {
            return None;
        }
        ratios.sort_by(|a, b| a.total_cmp(b));
        let k = ratios.len();
        let median = if k % 2 == 1 {
            ratios[k / 2]
        } else {
            0.5 * (ratios[k / 2 - 1] + ratios[k / 2])
        };
        if median <= 0.0 {
            return None;
        }
        Some(
            ratios
                .iter()
                .map(|r| (r / median).max(median / r))
                .fold(1.0, f64::max),
        )
    }
}

/// Sample variance of `L_n(S)` for each length in `n_list`. The length at
/// index `i` uses streams `(i << 32) | r`.
pub fn variance_scan(
    template: &ExperimentConfig,
    n_list: &[usize],
    replicates: usize,
    opts: RunOptions,
) -> Result<VarianceScanReport> {
    template.validate()?;
    if n_list.is_empty() {
        return Err(Error::config("run.n_list", "no lengths given"));
    }
    if replicates == 0 {
        return Err(Error::config("run.replicates", "must be at least 1"));
    }
    let mut warnings = Vec::new();
    if replicates < MIN_RECOMMENDED_REPLICATES {
        warnings.push(format!(
            "{replicates} replicates per length; at least {MIN_RECOMMENDED_REPLICATES} are recommended"
        ));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        if n == 0 {
            return Err(Error::config("run.n_list", "lengths must be positive"));
        }
        let scores = run_units(replicates, opts, |r| {
            let stream = ((i as u64) << 32) | r as u64;
            let mut rng = replicate_rng(template.master_seed, stream);
            let x = template.distribution.sample(n, &mut rng);
            let y = template.distribution.sample(n, &mut rng);
            Ok(optimal_score(&x, &y, &template.scoring)?.to_f64())
        })?;
        let mean = scores.iter().sum::<f64>() / replicates as f64;
        let variance = (replicates > 1).then(|| {
            scores.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (replicates - 1) as f64
        });
        if variance.is_none() {
            warnings.push(format!("n = {n}: variance undefined with one replicate"));
        }
        rows.push(VarianceRow {
            n,
            replicates,
            mean,
            variance,
            variance_over_n: variance.map(|v| v / n as f64),
        });
    }
    Ok(VarianceScanReport {
        config: template.clone(),
        rows,
        warnings,
    })
}
