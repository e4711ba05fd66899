//! Monte Carlo experiments on random string pairs.
//!
//! Every replicate draws its strings from its own ChaCha8 stream, selected by
//! `set_stream` from a generator seeded with the master seed. Replicates
//! therefore do not depend on scheduling, and reports are identical for any
//! worker count.

mod bounds;
mod diagnostics;
mod expected;
mod statistic;
mod variance;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alphabet, LetterDistribution, ScoringMatrix};
use crate::perturbation::PerturbationSpec;

pub use bounds::{c_n_constant, c_n_from_ln, lambda_margin, pvalue_bound, PValueReport, ReferenceComparison};
pub use diagnostics::{
    evaluate_events, mcdiarmid_check, EventFlags, EventReport, LambdaReferences, McDiarmidReport,
    TailRow,
};
pub use expected::{expected_change_mc, expected_change_mc_capped, ExpectedChangeRecord, ExpectedChangeReport};
pub use statistic::{run_statistic, EstimateReport, ReplicateRecord};
pub use variance::{variance_scan, VarianceRow, VarianceScanReport, MIN_RECOMMENDED_REPLICATES};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub alphabet: Alphabet,
    pub distribution: LetterDistribution,
    pub scoring: ScoringMatrix,
    pub perturbation: PerturbationSpec,
    pub eps: f64,
    pub n: usize,
    pub replicates: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scoring.alphabet() != &self.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        if self.distribution.probs().len() != self.alphabet.len() {
            return Err(Error::InvalidDistribution(
                "distribution does not match the alphabet".into(),
            ));
        }
        if !self.eps.is_finite() || self.eps < 0.0 {
            return Err(Error::config("run.eps", "must be a finite non-negative number"));
        }
        if self.n == 0 {
            return Err(Error::config("run.n", "must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(Error::config("run.replicates", "must be at least 1"));
        }
        self.perturbation.build_t(&self.scoring)?;
        Ok(())
    }

    /// `T` and `S - eps T`.
    pub fn derived_matrices(&self) -> Result<(ScoringMatrix, ScoringMatrix)> {
        let t = self.perturbation.build_t(&self.scoring)?;
        let smt = self.scoring.linear_combine(self.eps, &t)?;
        Ok((t, smt))
    }
}

/// Execution knobs that must not change any reported statistic.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub workers: usize,
    pub record_timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: 1,
            record_timings: false,
        }
    }
}

/// The random stream of one work unit.
pub fn replicate_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Run `job` for every unit on `workers` threads, results in unit order.
pub(crate) fn run_units<T, F>(units: usize, opts: RunOptions, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if opts.workers <= 1 {
        return (0..units).map(&job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..units).into_par_iter().map(&job).collect())
}

pub(crate) fn timed<T>(record: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<f64>)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, record.then(|| start.elapsed().as_secs_f64() * 1e3)))
}

/// Mean, spread and range of a list of replicate values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation, `count - 1` denominator.
    pub std_dev: Option<f64>,
    pub std_error: Option<f64>,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let std_dev = (count > 1).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt()
        });
        Summary {
            count,
            mean,
            std_dev,
            std_error: std_dev.map(|s| s / (count as f64).sqrt()),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}
