//! Symmetric scoring functions over the gap-augmented alphabet.
//!
//! A [`ScoringMatrix`] stores one score per pair of symbols, the gap being the
//! last row and column. The (gap, gap) cell is never read unless explicitly
//! defined. Each matrix also carries a [`Kernel`], the form used by the
//! dynamic programs: when all entries share a denominator `q <= 1000` (or a
//! power of ten up to `10^6`) the kernel holds the integers `q * S(c, d)` and
//! alignment scores are exact; otherwise it holds plain `f64`s.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::alphabet::{Alphabet, Symbol};
use super::score::{small_denominator, Score};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    Scaled { denom: i64, table: Vec<i64> },
    Float { table: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ScoringMatrix {
    alphabet: Alphabet,
    entries: Vec<f64>,
    gap_gap_defined: bool,
    kernel: Kernel,
}

/// Serialized form: the alphabet and the full augmented table, `null` in the
/// (gap, gap) cell when it is undefined.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    alphabet: Alphabet,
    rows: Vec<Vec<Option<f64>>>,
}

impl TryFrom<MatrixRepr> for ScoringMatrix {
    type Error = Error;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        let m = r.alphabet.augmented_len();
        if r.rows.len() != m || r.rows.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidMatrix(format!("expected a {m}x{m} table")));
        }
        let gap_gap = r.rows[m - 1][m - 1];
        let mut entries = Vec::with_capacity(m * m);
        for (i, row) in r.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                match v {
                    Some(v) => entries.push(*v),
                    None if i == m - 1 && j == m - 1 => entries.push(0.0),
                    None => {
                        return Err(Error::InvalidMatrix(format!("missing entry ({i}, {j})")))
                    }
                }
            }
        }
        ScoringMatrix::new(r.alphabet, entries, gap_gap.is_some())
    }
}

impl From<ScoringMatrix> for MatrixRepr {
    fn from(s: ScoringMatrix) -> Self {
        let m = s.size();
        let rows = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if s.is_gap_gap(i, j) && !s.gap_gap_defined {
                            None
                        } else {
                            Some(s.entries[i * m + j])
                        }
                    })
                    .collect()
            })
            .collect();
        MatrixRepr {
            alphabet: s.alphabet,
            rows,
        }
    }
}

/// BLASTZ default nucleotide substitution scores, rows and columns A, T, C, G.
pub const BLASTZ_SCORES: [[f64; 4]; 4] = [
    [91.0, -31.0, -114.0, -123.0],
    [-31.0, 100.0, -125.0, -114.0],
    [-114.0, -125.0, 100.0, -31.0],
    [-123.0, -114.0, -31.0, 91.0],
];

impl ScoringMatrix {
    /// `entries` is the row-major `(k+1) x (k+1)` table, gap last. The
    /// (gap, gap) cell is ignored unless `gap_gap_defined`.
    pub fn new(alphabet: Alphabet, mut entries: Vec<f64>, gap_gap_defined: bool) -> Result<Self> {
        let m = alphabet.augmented_len();
        if entries.len() != m * m {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for a {m}x{m} table",
                entries.len()
            )));
        }
        if !gap_gap_defined {
            entries[m * m - 1] = 0.0;
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                if entries[i * m + j] != entries[j * m + i] {
                    let (a, b) = (alphabet.letter(i as Symbol), alphabet.letter(j as Symbol));
                    return Err(Error::InvalidMatrix(format!(
                        "not symmetric at ({}, {}): {} vs {}",
                        a.unwrap_or('?'),
                        b.unwrap_or('?'),
                        entries[i * m + j],
                        entries[j * m + i]
                    )));
                }
            }
        }
        let kernel = match small_denominator(&entries) {
            Some(denom) => {
                let table: Vec<i64> = entries
                    .iter()
                    .map(|v| (v * denom as f64).round() as i64)
                    .collect();
                for (e, u) in entries.iter_mut().zip(&table) {
                    *e = *u as f64 / denom as f64;
                }
                Kernel::Scaled { denom, table }
            }
            None => Kernel::Float {
                table: entries.clone(),
            },
        };
        Ok(ScoringMatrix {
            alphabet,
            entries,
            gap_gap_defined,
            kernel,
        })
    }

    /// Letter block plus one gap score per letter.
    pub fn from_blocks(alphabet: Alphabet, block: &[Vec<f64>], gap_scores: &[f64]) -> Result<Self> {
        let k = alphabet.len();
        if block.len() != k || block.iter().any(|r| r.len() != k) || gap_scores.len() != k {
            return Err(Error::InvalidMatrix(format!(
                "expected a {k}x{k} letter block and {k} gap scores"
            )));
        }
        let m = k + 1;
        let mut entries = vec![0.0; m * m];
        for i in 0..k {
            for j in 0..k {
                entries[i * m + j] = block[i][j];
            }
            entries[i * m + k] = gap_scores[i];
            entries[k * m + i] = gap_scores[i];
        }
        ScoringMatrix::new(alphabet, entries, false)
    }

    /// Match/mismatch scoring with a uniform gap penalty `delta`, i.e.
    /// `S(c, gap) = -delta` for every letter.
    pub fn match_mismatch(alphabet: Alphabet, matched: f64, mismatched: f64, delta: f64) -> Result<Self> {
        let k = alphabet.len();
        let block: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| if i == j { matched } else { mismatched }).collect())
            .collect();
        ScoringMatrix::from_blocks(alphabet, &block, &vec![-delta; k])
    }

    /// `id_2`: identity scoring on `{0, 1}` (match 1, mismatch 0).
    pub fn identity_binary(delta: f64) -> Self {
        ScoringMatrix::match_mismatch(Alphabet::binary(), 1.0, 0.0, delta).unwrap()
    }

    /// BLASTZ default substitution matrix over A, T, C, G with gap penalty `delta`.
    pub fn blastz(delta: f64) -> Self {
        let block: Vec<Vec<f64>> = BLASTZ_SCORES.iter().map(|r| r.to_vec()).collect();
        ScoringMatrix::from_blocks(Alphabet::dna(), &block, &[-delta; 4]).unwrap()
    }

    pub fn zero(alphabet: Alphabet) -> Self {
        let m = alphabet.augmented_len();
        ScoringMatrix::new(alphabet, vec![0.0; m * m], false).unwrap()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of symbols including the gap.
    pub fn size(&self) -> usize {
        self.alphabet.augmented_len()
    }

    pub fn gap_gap_defined(&self) -> bool {
        self.gap_gap_defined
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kernel, Kernel::Scaled { .. })
    }

    fn is_gap_gap(&self, i: usize, j: usize) -> bool {
        let g = self.size() - 1;
        i == g && j == g
    }

    fn readable(&self, i: usize, j: usize) -> bool {
        self.gap_gap_defined || !self.is_gap_gap(i, j)
    }

    /// Entry as a float. Reading an undefined (gap, gap) cell yields 0.
    pub fn get(&self, c: Symbol, d: Symbol) -> f64 {
        self.entries[c as usize * self.size() + d as usize]
    }

    /// Entry as an exact score where possible.
    pub fn score(&self, c: Symbol, d: Symbol) -> Score {
        let idx = c as usize * self.size() + d as usize;
        match &self.kernel {
            Kernel::Scaled { denom, table } => Score::from_units(table[idx], *denom),
            Kernel::Float { table } => Score::Approx(table[idx]),
        }
    }

    pub fn gap_score(&self, c: Symbol) -> f64 {
        self.get(c, self.alphabet.gap_symbol())
    }

    /// Largest change of a column score when one symbol of the column is
    /// replaced: `max |S(c,d) - S(c,e)|` over the augmented alphabet.
    pub fn norm_delta(&self) -> Score {
        let m = self.size();
        let mut best = Score::ZERO;
        for c in 0..m {
            let row: Vec<Score> = (0..m)
                .filter(|&d| self.readable(c, d))
                .map(|d| self.score(c as Symbol, d as Symbol))
                .collect();
            let hi = row.iter().copied().fold(None, |acc: Option<Score>, s| {
                Some(acc.map_or(s, |a| a.max(s)))
            });
            let lo = row.iter().copied().fold(None, |acc: Option<Score>, s| {
                Some(acc.map_or(s, |a| if s < a { s } else { a }))
            });
            if let (Some(hi), Some(lo)) = (hi, lo) {
                best = best.max(hi - lo);
            }
        }
        best
    }

    /// `max |S(c,d)|` over the augmented alphabet.
    pub fn norm_inf(&self) -> Score {
        let m = self.size();
        let mut best = Score::ZERO;
        for c in 0..m {
            for d in 0..m {
                if self.readable(c, d) {
                    best = best.max(self.score(c as Symbol, d as Symbol).abs());
                }
            }
        }
        best
    }

    /// Entrywise `S - eps * T`.
    pub fn linear_combine(&self, eps: f64, t: &ScoringMatrix) -> Result<ScoringMatrix> {
        if self.alphabet != t.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        if !eps.is_finite() {
            return Err(Error::Precondition("eps must be finite".into()));
        }
        if eps == 0.0 {
            return Ok(self.clone());
        }
        let entries = self
            .entries
            .iter()
            .zip(&t.entries)
            .map(|(s, t)| s - eps * t)
            .collect();
        ScoringMatrix::new(
            self.alphabet.clone(),
            entries,
            self.gap_gap_defined && t.gap_gap_defined,
        )
    }

    /// Entrywise `factor * S`.
    pub fn scale(&self, factor: f64) -> Result<ScoringMatrix> {
        ScoringMatrix::zero(self.alphabet.clone()).linear_combine(-factor, self)
    }

    /// Same scores with the letters relabelled: letter `i` of the result is
    /// letter `perm[i]` of `self`.
    pub fn permute_letters(&self, perm: &[usize]) -> Result<ScoringMatrix> {
        let k = self.alphabet.len();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..k).collect::<Vec<_>>() {
            return Err(Error::Precondition("not a permutation of the letters".into()));
        }
        let m = k + 1;
        let map = |i: usize| if i == k { k } else { perm[i] };
        let letters = (0..k).map(|i| self.alphabet.letters()[perm[i]]).collect();
        let alphabet = Alphabet::new(letters, self.alphabet.gap())?;
        let entries = (0..m * m)
            .map(|idx| self.entries[map(idx / m) * m + map(idx % m)])
            .collect();
        ScoringMatrix::new(alphabet, entries, self.gap_gap_defined)
    }

    /// Parse the plain-text format: a line of space-separated letters, then
    /// the full augmented table with the gap row and column last. `#` starts a
    /// comment. A `*` or `NA` in the (gap, gap) cell leaves it undefined.
    pub fn from_text(text: &str) -> Result<ScoringMatrix> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidMatrix("empty matrix file".into()))?;
        let mut letters = Vec::new();
        for tok in header.split_whitespace() {
            let mut chars = tok.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => letters.push(c),
                _ => {
                    return Err(Error::InvalidMatrix(format!(
                        "letters must be single characters, got {tok:?}"
                    )))
                }
            }
        }
        let alphabet = Alphabet::new(letters, super::alphabet::DEFAULT_GAP)?;
        let m = alphabet.augmented_len();
        let mut entries = Vec::with_capacity(m * m);
        let mut gap_gap_defined = true;
        let mut nrows = 0;
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != m {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} values, expected {m}",
                    nrows + 1,
                    toks.len()
                )));
            }
            for (j, tok) in toks.iter().enumerate() {
                if nrows == m - 1 && j == m - 1 && (*tok == "*" || tok.eq_ignore_ascii_case("na")) {
                    gap_gap_defined = false;
                    entries.push(0.0);
                    continue;
                }
                let v: f64 = tok.parse().map_err(|_| {
                    Error::InvalidMatrix(format!("row {}: cannot parse {tok:?}", nrows + 1))
                })?;
                entries.push(v);
            }
            nrows += 1;
        }
        if nrows != m {
            return Err(Error::InvalidMatrix(format!("{nrows} rows, expected {m}")));
        }
        ScoringMatrix::new(alphabet, entries, gap_gap_defined)
    }

    pub fn to_text(&self) -> String {
        let m = self.size();
        let mut out = String::new();
        let letters: Vec<String> = self.alphabet.letters().iter().map(|c| c.to_string()).collect();
        out.push_str(&letters.join(" "));
        out.push('\n');
        for i in 0..m {
            let row: Vec<String> = (0..m)
                .map(|j| {
                    if self.readable(i, j) {
                        format!("{}", self.entries[i * m + j])
                    } else {
                        "*".to_string()
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id2(delta: f64) -> ScoringMatrix {
        ScoringMatrix::identity_binary(delta)
    }

    #[test]
    fn norms_of_identity() {
        let s = id2(6.0);
        assert_eq!(s.norm_delta(), Score::from_int(7));
        assert_eq!(s.norm_inf(), Score::from_int(6));
    }

    #[test]
    fn norms_of_blastz() {
        let s = ScoringMatrix::blastz(1200.0);
        assert_eq!(s.norm_delta(), Score::from_int(1300));
        assert_eq!(s.norm_inf(), Score::from_int(1200));
        assert_eq!(s.get(0, 0), 91.0);
        let (t, c, g, a) = (1, 2, 3, 0);
        assert_eq!(s.get(t, c), -125.0);
        assert_eq!(s.get(g, a), -123.0);
        assert_eq!(s.get(a, g), -123.0);
    }

    #[test]
    fn constant_and_zero_matrices() {
        let a = Alphabet::binary();
        let c = ScoringMatrix::match_mismatch(a.clone(), 3.0, 3.0, -3.0).unwrap();
        assert_eq!(c.norm_delta(), Score::ZERO);
        let z = ScoringMatrix::zero(a);
        assert_eq!(z.norm_inf(), Score::ZERO);
        assert_eq!(z.norm_delta(), Score::ZERO);
    }

    #[test]
    fn gap_gap_cell_is_excluded_unless_defined() {
        let a = Alphabet::binary();
        let mut e = vec![1.0, 0.0, -1.0, 0.0, 1.0, -1.0, -1.0, -1.0, 50.0];
        let undefined = ScoringMatrix::new(a.clone(), e.clone(), false).unwrap();
        assert_eq!(undefined.norm_inf(), Score::from_int(1));
        assert_eq!(undefined.norm_delta(), Score::from_int(2));
        e[8] = 50.0;
        let defined = ScoringMatrix::new(a, e, true).unwrap();
        assert_eq!(defined.norm_inf(), Score::from_int(50));
        assert_eq!(defined.norm_delta(), Score::from_int(51));
    }

    #[test]
    fn linear_combination() {
        let s = id2(6.0);
        let t = ScoringMatrix::from_blocks(
            Alphabet::binary(),
            &[vec![-4.0, 2.0], vec![2.0, 0.0]],
            &[0.0, 0.0],
        )
        .unwrap();
        let r = s.linear_combine(0.5, &t).unwrap();
        assert_eq!(r.get(0, 0), 3.0);
        assert_eq!(r.get(0, 1), -1.0);
        assert_eq!(r.get(1, 0), -1.0);
        assert_eq!(r.get(1, 1), 1.0);
        assert_eq!(r.gap_score(0), -6.0);
        assert_eq!(r.gap_score(1), -6.0);
        assert_eq!(s.linear_combine(0.0, &t).unwrap(), s);
        assert_eq!(s.linear_combine(0.7, &ScoringMatrix::zero(Alphabet::binary())).unwrap(), s);
    }

    #[test]
    fn blastz_combination_is_exact() {
        let s = ScoringMatrix::blastz(1200.0);
        let mut e = vec![0.0; 25];
        e[2 * 5 + 2] = -439.0;
        let t = ScoringMatrix::new(Alphabet::dna(), e, false).unwrap();
        let r = s.linear_combine(0.9, &t).unwrap();
        assert_eq!(r.score(2, 2), Score::from_units(4951, 10));
        assert_eq!(r.get(2, 2), 495.1);
        assert!(r.is_exact());
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let s = id2(1.0);
        let t = ScoringMatrix::blastz(1.0);
        assert!(matches!(s.linear_combine(1.0, &t), Err(Error::AlphabetMismatch)));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let a = Alphabet::binary();
        let e = vec![1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        assert!(ScoringMatrix::new(a, e, false).is_err());
    }

    #[test]
    fn irrational_entries_fall_back_to_floats() {
        let s = ScoringMatrix::match_mismatch(Alphabet::binary(), std::f64::consts::PI, 0.0, 1.0)
            .unwrap();
        assert!(!s.is_exact());
        assert!(!s.norm_delta().is_exact());
    }

    #[test]
    fn text_format() {
        let text = "# blastz, gap 400\nA T C G\n\
            91 -31 -114 -123 -400\n\
            -31 100 -125 -114 -400\n\
            -114 -125 100 -31 -400\n\
            -123 -114 -31 91 -400 # trailing\n\
            -400 -400 -400 -400 *\n";
        let s = ScoringMatrix::from_text(text).unwrap();
        assert_eq!(s, ScoringMatrix::blastz(400.0));
        assert_eq!(ScoringMatrix::from_text(&s.to_text()).unwrap(), s);

        let bad = "0 1\n1 0 -1\n1 1 -1\n-1 -1 *\n";
        assert!(matches!(ScoringMatrix::from_text(bad), Err(Error::InvalidMatrix(_))));
        let short = "0 1\n1 0 -1\n0 1 -1\n";
        assert!(ScoringMatrix::from_text(short).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let s = ScoringMatrix::blastz(1200.0);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("null"));
        let back: ScoringMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
