use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};

/// i.i.d. letter law over the letters of an alphabet (the gap carries no mass).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LetterDistribution {
    probs: Vec<f64>,
}

impl LetterDistribution {
    pub fn new(alphabet: &Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for {} letters",
                probs.len(),
                alphabet.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(LetterDistribution { probs })
    }

    pub fn uniform(alphabet: &Alphabet) -> Self {
        let k = alphabet.len();
        LetterDistribution {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, s: Symbol) -> f64 {
        self.probs.get(s as usize).copied().unwrap_or(0.0)
    }

    /// `n` i.i.d. letters.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Symbol> {
        let dist = WeightedIndex::new(&self.probs).expect("validated distribution");
        (0..n).map(|_| dist.sample(rng) as Symbol).collect()
    }
}
