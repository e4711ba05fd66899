//! Alphabets, letter laws, scoring matrices and score values.

pub mod alphabet;
pub mod distribution;
pub mod matrix;
pub mod score;

pub use alphabet::{Alphabet, Symbol, DEFAULT_GAP};
pub use distribution::LetterDistribution;
pub use matrix::{Kernel, ScoringMatrix, BLASTZ_SCORES};
pub use score::Score;
