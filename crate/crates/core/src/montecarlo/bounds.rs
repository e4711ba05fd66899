//! Convergence margins of `lambda_n` and the false-positive bound on the
//! test statistic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ScoringMatrix;

/// `c_n = sqrt((2 ln 3 + 2 ln(n + 2)) / ln n)`, defined for `n >= 2`.
pub fn c_n_constant(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition(format!("c_n needs n >= 2, got {n}")));
    }
    let n = n as f64;
    Ok(((2.0 * 3f64.ln() + 2.0 * (n + 2.0).ln()) / n.ln()).sqrt())
}

/// `c_n` for `n = exp(ln_n)`, usable far beyond the range of `u64`.
pub fn c_n_from_ln(ln_n: f64) -> Result<f64> {
    if ln_n.is_nan() || ln_n < 2f64.ln() {
        return Err(Error::Precondition(format!("c_n needs n >= 2, got ln n = {ln_n}")));
    }
    // ln(n + 2) = ln n + ln(1 + 2/n)
    let ln_n_plus_2 = ln_n + (2.0 * (-ln_n).exp()).ln_1p();
    Ok(((2.0 * 3f64.ln() + 2.0 * ln_n_plus_2) / ln_n).sqrt())
}

fn sqrt_log_rate(n: u64) -> f64 {
    let n = n as f64;
    n.ln().sqrt() / n.sqrt()
}

/// Upper bound on `lambda(S) - lambda_n(S)`:
/// `c_n ||S||_delta sqrt(ln n / n) + 2 ||S||_inf / n`.
pub fn lambda_margin(n: u64, s: &ScoringMatrix) -> Result<f64> {
    let c_n = c_n_constant(n)?;
    Ok(c_n * s.norm_delta().to_f64() * sqrt_log_rate(n) + 2.0 * s.norm_inf().to_f64() / n as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceComparison {
    /// Externally reported p-value for the same inputs.
    pub pvalue: f64,
    /// `Delta` that would make the bound equal `pvalue`.
    pub implied_delta: f64,
    /// Statistic value that would make the bound equal `pvalue`.
    pub implied_x: f64,
    /// `bound / pvalue`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValueReport {
    pub x: f64,
    pub n: u64,
    pub eps: f64,
    pub c_n: f64,
    pub norm_delta_s: f64,
    pub norm_delta_smt: f64,
    /// `||S||_delta + ||S - eps T||_delta`, the bounded-difference constant of
    /// `L_n(S) - L_n(S - eps T)`.
    pub norm_sum: f64,
    /// `c_n ||S - eps T||_delta sqrt(ln n) / sqrt(n)`.
    pub margin: f64,
    pub delta: f64,
    /// `-n Delta^2 / norm_sum^2`, kept separately because `bound` underflows.
    pub log_bound: f64,
    pub bound: f64,
    pub inconclusive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceComparison>,
}

impl PValueReport {
    pub fn verdict(&self) -> &'static str {
        if self.inconclusive {
            "INCONCLUSIVE"
        } else {
            "CONCLUSIVE"
        }
    }

    /// Fill in the comparison against an externally reported p-value.
    pub fn compare_with(&mut self, pvalue: f64) -> Result<()> {
        if !(pvalue > 0.0 && pvalue <= 1.0) {
            return Err(Error::Precondition(format!(
                "reference p-value {pvalue} is not in (0, 1]"
            )));
        }
        let implied_delta = self.norm_sum * (-pvalue.ln() / self.n as f64).sqrt();
        self.reference = Some(ReferenceComparison {
            pvalue,
            implied_delta,
            implied_x: self.margin + implied_delta,
            ratio: self.bound / pvalue,
        });
        Ok(())
    }
}

/// Bound on `P((L_n(S) - L_n(S - eps T)) / n >= x)` when in fact
/// `lambda(S) - lambda(S - eps T) < 0`:
/// `exp(-n Delta^2 / (||S||_delta + ||S - eps T||_delta)^2)` with
/// `Delta = x - c_n ||S - eps T||_delta sqrt(ln n / n)`. For `Delta <= 0` the
/// bound certifies nothing; the report is flagged inconclusive and carries 1.
pub fn pvalue_bound(x: f64, n: u64, s: &ScoringMatrix, eps: f64, t: &ScoringMatrix) -> Result<PValueReport> {
    if !x.is_finite() {
        return Err(Error::Precondition("x must be finite".into()));
    }
    let c_n = c_n_constant(n)?;
    let smt = s.linear_combine(eps, t)?;
    let norm_delta_s = s.norm_delta().to_f64();
    let norm_delta_smt = smt.norm_delta().to_f64();
    let norm_sum = norm_delta_s + norm_delta_smt;
    let margin = c_n * norm_delta_smt * sqrt_log_rate(n);
    let delta = x - margin;
    let inconclusive = delta <= 0.0 || norm_sum == 0.0;
    let log_bound = if inconclusive {
        0.0
    } else {
        -(n as f64) * delta * delta / (norm_sum * norm_sum)
    };
    Ok(PValueReport {
        x,
        n,
        eps,
        c_n,
        norm_delta_s,
        norm_delta_smt,
        norm_sum,
        margin,
        delta,
        log_bound,
        bound: log_bound.exp(),
        inconclusive,
        reference: None,
    })
}
