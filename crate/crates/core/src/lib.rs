//! Optimal alignment scores of random strings and Monte Carlo tests for the
//! order of their fluctuations.
//!
//! The crate computes optimal global alignment scores under arbitrary
//! symmetric scoring functions, builds the perturbation scoring function `T`
//! whose alignment score measures the expected effect of a random letter
//! change, estimates `lambda(S) - lambda(S - eps T)` by simulation and turns
//! the estimate into a McDiarmid-type bound on the probability of a
//! false positive.

pub mod alignment;
pub mod cli;
pub mod config;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod perturbation;
pub mod report;
pub mod selftest;

pub use error::{Error, Result};
pub use model::{Alphabet, LetterDistribution, Score, ScoringMatrix, Symbol};
