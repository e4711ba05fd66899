//! Global alignment with gaps: optimal scores by dynamic programming, explicit
//! optimal alignments, pair-count matrices and an exhaustive oracle.
//!
//! Every letter left unaligned is scored against the gap symbol, so the
//! recurrence is
//!
//! ```text
//! M[i][j] = max(M[i-1][j-1] + S(x_i, y_j), M[i-1][j] + S(x_i, gap), M[i][j-1] + S(gap, y_j))
//! ```
//!
//! with `M[0][0] = 0` and cumulative gap scores along the borders. A column
//! never aligns a gap with a gap.

use std::fmt::Write as _;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::model::{Alphabet, Kernel, Score, ScoringMatrix, Symbol};

/// Longest string accepted by [`optimal_alignment`] unless a cap is given.
pub const DEFAULT_TRACEBACK_CAP: usize = 20_000;

/// Longest string accepted by [`brute_force_score`].
pub const BRUTE_FORCE_MAX_LEN: usize = 7;

/// Strictly increasing list of aligned 1-based index pairs `(mu, nu)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alignment {
    pairs: Vec<(usize, usize)>,
}

impl Alignment {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        for (k, &(mu, nu)) in pairs.iter().enumerate() {
            if mu == 0 || nu == 0 {
                return Err(Error::InvalidAlignment(format!(
                    "pair {} ({mu}, {nu}) is not 1-based",
                    k + 1
                )));
            }
            if k > 0 {
                let (pm, pn) = pairs[k - 1];
                if mu <= pm || nu <= pn {
                    return Err(Error::InvalidAlignment(format!(
                        "pair {} ({mu}, {nu}) does not increase strictly",
                        k + 1
                    )));
                }
            }
        }
        Ok(Alignment { pairs })
    }

    pub fn empty() -> Self {
        Alignment::default()
    }

    /// Aligns position `i` with position `i` for `i = 1..=n`.
    pub fn identity(n: usize) -> Self {
        Alignment {
            pairs: (1..=n).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn check_bounds(&self, x_len: usize, y_len: usize) -> Result<()> {
        match self.pairs.last() {
            Some(&(mu, nu)) if mu > x_len || nu > y_len => Err(Error::InvalidAlignment(format!(
                "pair ({mu}, {nu}) out of range for lengths ({x_len}, {y_len})"
            ))),
            _ => Ok(()),
        }
    }

    /// One `mu<TAB>nu` line per aligned pair.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (mu, nu) in &self.pairs {
            let _ = writeln!(out, "{mu}\t{nu}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let parse = |f: Option<&str>| -> Result<usize> {
                f.and_then(|s| s.trim().parse().ok()).ok_or_else(|| {
                    Error::Parse(format!("alignment line {}: {line:?}", lineno + 1))
                })
            };
            let mu = parse(fields.next())?;
            let nu = parse(fields.next())?;
            if fields.next().is_some() {
                return Err(Error::Parse(format!("alignment line {}: extra fields", lineno + 1)));
            }
            pairs.push((mu, nu));
        }
        Alignment::new(pairs)
    }
}

/// Column counts of an alignment: `counts(c, d)` is the number of columns with
/// `c` from `x` over `d` from `y`, gap included. The (gap, gap) count is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    size: usize,
    counts: Vec<u64>,
}

impl QMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, c: Symbol, d: Symbol) -> u64 {
        self.counts[c as usize * self.size + d as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `sum_{c,d} counts(c, d) * S(c, d)`.
    pub fn contract(&self, s: &ScoringMatrix) -> Result<Score> {
        if s.size() != self.size {
            return Err(Error::AlphabetMismatch);
        }
        let mut total = Score::ZERO;
        for c in 0..self.size {
            for d in 0..self.size {
                let n = self.counts[c * self.size + d];
                if n > 0 {
                    total = total + s.score(c as Symbol, d as Symbol).mul_int(n as i64);
                }
            }
        }
        Ok(total)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentResult {
    pub score: Score,
    pub alignment: Alignment,
    pub q_counts: QMatrix,
}

trait Weight: Copy + PartialOrd + Add<Output = Self> {
    const ZERO: Self;
    fn to_score(self, denom: i64) -> Score;
}

impl Weight for i64 {
    const ZERO: Self = 0;
    fn to_score(self, denom: i64) -> Score {
        Score::from_units(self, denom)
    }
}

impl Weight for f64 {
    const ZERO: Self = 0.0;
    fn to_score(self, _denom: i64) -> Score {
        Score::Approx(self)
    }
}

#[inline(always)]
fn wmax<W: Weight>(a: W, b: W) -> W {
    if b > a {
        b
    } else {
        a
    }
}

/// Last row of the DP: `O(|y|)` memory.
fn dp_last<W: Weight>(x: &[Symbol], y: &[Symbol], table: &[W], m: usize) -> W {
    let gap = m - 1;
    let gap_row = &table[gap * m..gap * m + m];
    let mut row = Vec::with_capacity(y.len() + 1);
    row.push(W::ZERO);
    for &d in y {
        let last = *row.last().unwrap();
        row.push(last + gap_row[d as usize]);
    }
    for &c in x {
        let sub = &table[c as usize * m..c as usize * m + m];
        let gx = sub[gap];
        let mut diag = row[0];
        row[0] = row[0] + gx;
        let mut left = row[0];
        for (cell, &d) in row[1..].iter_mut().zip(y) {
            let up = *cell;
            let v = wmax(wmax(diag + sub[d as usize], up + gx), left + gap_row[d as usize]);
            diag = up;
            *cell = v;
            left = v;
        }
    }
    row[y.len()]
}

const DIAG: u8 = 0;
const UP: u8 = 1;
const LEFT: u8 = 2;

/// Full DP with traceback. Ties go to the diagonal, then to `x_i` against a
/// gap, then to `y_j` against a gap.
fn dp_traceback<W: Weight>(x: &[Symbol], y: &[Symbol], table: &[W], m: usize) -> (W, Vec<(usize, usize)>) {
    let gap = m - 1;
    let (n1, n2) = (x.len(), y.len());
    let w = n2 + 1;
    let mut dir = vec![LEFT; (n1 + 1) * w];
    let gap_row = &table[gap * m..gap * m + m];
    let mut row = Vec::with_capacity(w);
    row.push(W::ZERO);
    for &d in y {
        let last = *row.last().unwrap();
        row.push(last + gap_row[d as usize]);
    }
    for (i, &c) in x.iter().enumerate() {
        let sub = &table[c as usize * m..c as usize * m + m];
        let gx = sub[gap];
        let drow = &mut dir[(i + 1) * w..(i + 2) * w];
        let mut diag = row[0];
        row[0] = row[0] + gx;
        drow[0] = UP;
        let mut left = row[0];
        for j in 1..=n2 {
            let up = row[j];
            let d = y[j - 1] as usize;
            let via_diag = diag + sub[d];
            let via_up = up + gx;
            let via_left = left + gap_row[d];
            let (v, step) = if via_diag >= via_up && via_diag >= via_left {
                (via_diag, DIAG)
            } else if via_up >= via_left {
                (via_up, UP)
            } else {
                (via_left, LEFT)
            };
            drow[j] = step;
            diag = up;
            row[j] = v;
            left = v;
        }
    }
    let mut pairs = Vec::new();
    let (mut i, mut j) = (n1, n2);
    while i > 0 || j > 0 {
        match dir[i * w + j] {
            DIAG => {
                pairs.push((i, j));
                i -= 1;
                j -= 1;
            }
            UP => i -= 1,
            _ => j -= 1,
        }
    }
    pairs.reverse();
    (row[n2], pairs)
}

/// Optimal alignment score `L_S(x, y)` in `O(|x| |y|)` time.
pub fn optimal_score(x: &[Symbol], y: &[Symbol], s: &ScoringMatrix) -> Result<Score> {
    s.alphabet().check(x)?;
    s.alphabet().check(y)?;
    let m = s.size();
    Ok(match s.kernel() {
        Kernel::Scaled { denom, table } => {
            // exact scores make L(x, y) = L(y, x) bit for bit, so keep the
            // shorter string in the row
            let (a, b) = if y.len() > x.len() { (y, x) } else { (x, y) };
            dp_last(a, b, table, m).to_score(*denom)
        }
        Kernel::Float { table } => dp_last(x, y, table, m).to_score(1),
    })
}

/// An optimal alignment and its score, with strings up to [`DEFAULT_TRACEBACK_CAP`].
pub fn optimal_alignment(x: &[Symbol], y: &[Symbol], s: &ScoringMatrix) -> Result<AlignmentResult> {
    optimal_alignment_capped(x, y, s, DEFAULT_TRACEBACK_CAP)
}

pub fn optimal_alignment_capped(
    x: &[Symbol],
    y: &[Symbol],
    s: &ScoringMatrix,
    cap: usize,
) -> Result<AlignmentResult> {
    s.alphabet().check(x)?;
    s.alphabet().check(y)?;
    let longest = x.len().max(y.len());
    if longest > cap {
        return Err(Error::SizeCap { len: longest, cap });
    }
    let m = s.size();
    let (score, pairs) = match s.kernel() {
        Kernel::Scaled { denom, table } => {
            let (v, p) = dp_traceback(x, y, table, m);
            (v.to_score(*denom), p)
        }
        Kernel::Float { table } => {
            let (v, p) = dp_traceback(x, y, table, m);
            (v.to_score(1), p)
        }
    };
    let alignment = Alignment { pairs };
    let q_counts = pair_counts(x, y, &alignment, s.alphabet())?;
    Ok(AlignmentResult {
        score,
        alignment,
        q_counts,
    })
}

/// `Q_pi`: column counts of `pi` over the augmented alphabet.
pub fn pair_counts(x: &[Symbol], y: &[Symbol], pi: &Alignment, alphabet: &Alphabet) -> Result<QMatrix> {
    alphabet.check(x)?;
    alphabet.check(y)?;
    pi.check_bounds(x.len(), y.len())?;
    let size = alphabet.augmented_len();
    let gap = alphabet.gap_symbol() as usize;
    let mut counts = vec![0u64; size * size];
    let mut in_x = vec![false; x.len()];
    let mut in_y = vec![false; y.len()];
    for &(mu, nu) in pi.pairs() {
        in_x[mu - 1] = true;
        in_y[nu - 1] = true;
        counts[x[mu - 1] as usize * size + y[nu - 1] as usize] += 1;
    }
    for (&c, _) in x.iter().zip(&in_x).filter(|(_, &used)| !used) {
        counts[c as usize * size + gap] += 1;
    }
    for (&d, _) in y.iter().zip(&in_y).filter(|(_, &used)| !used) {
        counts[gap * size + d as usize] += 1;
    }
    Ok(QMatrix { size, counts })
}

/// `S_pi(x, y)`: aligned pairs plus every unaligned letter against a gap.
pub fn alignment_score(x: &[Symbol], y: &[Symbol], pi: &Alignment, s: &ScoringMatrix) -> Result<Score> {
    s.alphabet().check(x)?;
    s.alphabet().check(y)?;
    pi.check_bounds(x.len(), y.len())?;
    let gap = s.alphabet().gap_symbol();
    let mut total = Score::ZERO;
    let (mut next_x, mut next_y) = (1, 1);
    for &(mu, nu) in pi.pairs() {
        for &c in &x[next_x - 1..mu - 1] {
            total = total + s.score(c, gap);
        }
        for &d in &y[next_y - 1..nu - 1] {
            total = total + s.score(gap, d);
        }
        total = total + s.score(x[mu - 1], y[nu - 1]);
        next_x = mu + 1;
        next_y = nu + 1;
    }
    for &c in &x[next_x - 1..] {
        total = total + s.score(c, gap);
    }
    for &d in &y[next_y - 1..] {
        total = total + s.score(gap, d);
    }
    Ok(total)
}

/// Maximum of [`alignment_score`] over every alignment, by enumeration.
pub fn brute_force_score(x: &[Symbol], y: &[Symbol], s: &ScoringMatrix) -> Result<Score> {
    let longest = x.len().max(y.len());
    if longest > BRUTE_FORCE_MAX_LEN {
        return Err(Error::StringsTooLong {
            len: longest,
            max: BRUTE_FORCE_MAX_LEN,
        });
    }
    s.alphabet().check(x)?;
    s.alphabet().check(y)?;
    let mut best: Option<Score> = None;
    let mut pairs = Vec::new();
    enumerate(x, y, s, 0, 0, &mut pairs, &mut best)?;
    Ok(best.expect("the empty alignment always exists"))
}

fn enumerate(
    x: &[Symbol],
    y: &[Symbol],
    s: &ScoringMatrix,
    from_x: usize,
    from_y: usize,
    pairs: &mut Vec<(usize, usize)>,
    best: &mut Option<Score>,
) -> Result<()> {
    let pi = Alignment::new(pairs.clone())?;
    let v = alignment_score(x, y, &pi, s)?;
    if best.is_none_or(|b| v > b) {
        *best = Some(v);
    }
    for i in from_x..x.len() {
        for j in from_y..y.len() {
            pairs.push((i + 1, j + 1));
            enumerate(x, y, s, i + 1, j + 1, pairs, best)?;
            pairs.pop();
        }
    }
    Ok(())
}

/// Number of alignments of strings with lengths `a` and `b`: `sum_k C(a,k) C(b,k)`.
pub fn alignment_count(a: usize, b: usize) -> u128 {
    fn choose(n: usize, k: usize) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }
    (0..=a.min(b)).map(|k| choose(a, k) * choose(b, k)).sum()
}
