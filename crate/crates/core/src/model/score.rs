//! Alignment score values.
//!
//! Scores coming out of a matrix whose entries are all rationals with a small
//! common denominator are carried exactly; everything else is an `f64`.
//! Arithmetic between two exact scores stays exact, and any operation that
//! touches an approximate score degrades to `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;

#[derive(Clone, Copy, Debug)]
pub enum Score {
    Exact(Ratio<i128>),
    Approx(f64),
}

impl Score {
    pub const ZERO: Score = Score::Exact(Ratio::new_raw(0, 1));

    pub fn from_units(units: i64, denom: i64) -> Score {
        Score::Exact(Ratio::new(units as i128, denom as i128))
    }

    pub fn from_int(v: i64) -> Score {
        Score::Exact(Ratio::from_integer(v as i128))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Score::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Score::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Score::Approx(v) => v,
        }
    }

    pub fn abs(self) -> Score {
        match self {
            Score::Exact(r) => Score::Exact(if r < Ratio::from_integer(0) { -r } else { r }),
            Score::Approx(v) => Score::Approx(v.abs()),
        }
    }

    pub fn max(self, other: Score) -> Score {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn mul_int(self, k: i64) -> Score {
        match self {
            Score::Exact(r) => Score::Exact(r * Ratio::from_integer(k as i128)),
            Score::Approx(v) => Score::Approx(v * k as f64),
        }
    }

    /// Exact division by a positive integer count.
    pub fn div_int(self, k: i64) -> Score {
        assert!(k != 0, "division of a score by zero");
        match self {
            Score::Exact(r) => Score::Exact(r / Ratio::from_integer(k as i128)),
            Score::Approx(v) => Score::Approx(v / k as f64),
        }
    }

    /// Multiply by a real factor. Stays exact when the factor is a short decimal.
    pub fn mul_real(self, f: f64) -> Score {
        match (self, exact_ratio(f)) {
            (Score::Exact(r), Some(q)) => Score::Exact(r * q),
            _ => Score::Approx(self.to_f64() * f),
        }
    }

    /// Divide by a non-zero real factor, exactly when it is a short decimal.
    pub fn div_real(self, f: f64) -> Score {
        assert!(f != 0.0, "division of a score by zero");
        match (self, exact_ratio(f)) {
            (Score::Exact(r), Some(q)) => Score::Exact(r / q),
            _ => Score::Approx(self.to_f64() / f),
        }
    }
}

/// Rational form of `f` if it is `p/q` with a small denominator, to within float noise.
pub(crate) fn exact_ratio(f: f64) -> Option<Ratio<i128>> {
    if !f.is_finite() {
        return None;
    }
    small_denominator(std::slice::from_ref(&f))
        .map(|q| Ratio::new((f * q as f64).round() as i128, q as i128))
}

/// Smallest `q` such that every value times `q` is an integer (up to float
/// noise), searched over `1..=1000` and the powers of ten up to `10^6`.
pub(crate) fn small_denominator(values: &[f64]) -> Option<i64> {
    if values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    (1..=1000)
        .chain([10_000, 100_000, 1_000_000])
        .find(|&q| {
            values.iter().all(|&v| {
                let scaled = v * q as f64;
                let rounded = scaled.round();
                rounded.abs() < 1e15 && (scaled - rounded).abs() <= 1e-9 * rounded.abs().max(1.0)
            })
        })
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Score::Exact(a), Score::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl Add for Score {
    type Output = Score;
    fn add(self, rhs: Score) -> Score {
        match (self, rhs) {
            (Score::Exact(a), Score::Exact(b)) => Score::Exact(a + b),
            _ => Score::Approx(self.to_f64() + rhs.to_f64()),
        }
    }
}

impl Sub for Score {
    type Output = Score;
    fn sub(self, rhs: Score) -> Score {
        match (self, rhs) {
            (Score::Exact(a), Score::Exact(b)) => Score::Exact(a - b),
            _ => Score::Approx(self.to_f64() - rhs.to_f64()),
        }
    }
}

impl Neg for Score {
    type Output = Score;
    fn neg(self) -> Score {
        match self {
            Score::Exact(a) => Score::Exact(-a),
            Score::Approx(v) => Score::Approx(-v),
        }
    }
}

impl std::iter::Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        iter.fold(Score::ZERO, |acc, s| acc + s)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Score::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Score::Approx(v) => write!(f, "{v}"),
        }
    }
}
