//! Random letter changes and the scoring function `T` that prices them.
//!
//! A change picks one occurrence of a letter from the `from` set, uniformly
//! among all such occurrences in both strings, and overwrites it with a letter
//! drawn uniformly from the `to` set. For any fixed alignment `pi` the average
//! effect of the change on `S_pi` is `T_pi / N`, where `N` counts the
//! candidate occurrences. `T` scaled by an integer multiplicity stands for
//! that many simultaneous changes; the sampler itself always flips one letter.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alignment::{alignment_score, optimal_alignment_capped, optimal_score};
use crate::error::{Error, Result};
use crate::model::{Alphabet, Score, ScoringMatrix, Symbol};

/// Longest string [`exact_expected_change`] accepts by default.
pub const DEFAULT_EXACT_CHANGE_CAP: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeKind {
    Single,
    Group,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    kind: ChangeKind,
    from: Vec<Symbol>,
    to: Vec<Symbol>,
    multiplicity: u32,
}

impl PerturbationSpec {
    /// Change one `a` into a `b`.
    pub fn single(alphabet: &Alphabet, a: char, b: char, multiplicity: u32) -> Result<Self> {
        Self::new(alphabet, ChangeKind::Single, &[a], &[b], multiplicity)
    }

    /// Change one letter of `from` into a uniformly drawn letter of `to`.
    pub fn group(alphabet: &Alphabet, from: &[char], to: &[char]) -> Result<Self> {
        Self::new(alphabet, ChangeKind::Group, from, to, 1)
    }

    pub fn new(
        alphabet: &Alphabet,
        kind: ChangeKind,
        from: &[char],
        to: &[char],
        multiplicity: u32,
    ) -> Result<Self> {
        let encode = |set: &[char], what: &str| -> Result<Vec<Symbol>> {
            if set.is_empty() {
                return Err(Error::InvalidPerturbation(format!("empty {what} set")));
            }
            let mut out = Vec::with_capacity(set.len());
            for &c in set {
                let s = alphabet.index_of(c).ok_or_else(|| {
                    Error::InvalidPerturbation(format!("{what} letter {c:?} is not in the alphabet"))
                })?;
                if out.contains(&s) {
                    return Err(Error::InvalidPerturbation(format!("duplicate {what} letter {c:?}")));
                }
                out.push(s);
            }
            Ok(out)
        };
        let from = encode(from, "from")?;
        let to = encode(to, "to")?;
        if kind == ChangeKind::Single && (from.len() != 1 || to.len() != 1) {
            return Err(Error::InvalidPerturbation(
                "a single-letter change has exactly one from and one to letter".into(),
            ));
        }
        let mut fs = from.clone();
        let mut ts = to.clone();
        fs.sort_unstable();
        ts.sort_unstable();
        if fs != ts && from.iter().any(|f| to.contains(f)) {
            return Err(Error::InvalidPerturbation(
                "from and to sets overlap without being equal".into(),
            ));
        }
        if multiplicity == 0 {
            return Err(Error::InvalidPerturbation("multiplicity must be positive".into()));
        }
        Ok(PerturbationSpec {
            kind,
            from,
            to,
            multiplicity,
        })
    }

    pub fn kind(&self) -> ChangeKind {
        self.kind
    }

    pub fn from_set(&self) -> &[Symbol] {
        &self.from
    }

    pub fn to_set(&self) -> &[Symbol] {
        &self.to
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// True when every change leaves the strings as they were.
    pub fn is_trivial(&self) -> bool {
        let mut f = self.from.clone();
        let mut t = self.to.clone();
        f.sort_unstable();
        t.sort_unstable();
        f == t && f.len() == 1
    }

    /// The scoring function `T` for this change, multiplicity included.
    pub fn build_t(&self, s: &ScoringMatrix) -> Result<ScoringMatrix> {
        self.check_alphabet(s.alphabet())?;
        match self.kind {
            ChangeKind::Single => single_letter_t(s, self.from[0], self.to[0], self.multiplicity),
            ChangeKind::Group => {
                let t = group_change_t(s, &self.from, &self.to)?;
                if self.multiplicity == 1 {
                    Ok(t)
                } else {
                    t.scale(self.multiplicity as f64)
                }
            }
        }
    }

    /// Mean marginal probability of a single candidate occurrence per string
    /// position: `p_a` for a single change, `2 * sum p` over the from set for
    /// a group change.
    pub fn normalising_probability(&self, probs: &[f64]) -> f64 {
        let p: f64 = self.from.iter().map(|&s| probs.get(s as usize).copied().unwrap_or(0.0)).sum();
        match self.kind {
            ChangeKind::Single => p,
            ChangeKind::Group => 2.0 * p,
        }
    }

    fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        let k = alphabet.len();
        if self.from.iter().chain(&self.to).any(|&s| s as usize >= k) {
            return Err(Error::InvalidPerturbation(
                "change letters are outside the scoring alphabet".into(),
            ));
        }
        Ok(())
    }

    /// Candidate positions, those of `x` first: `(in_x, index)`.
    pub fn occurrences(&self, x: &[Symbol], y: &[Symbol]) -> Vec<(bool, usize)> {
        let hit = |s: &Symbol| self.from.contains(s);
        x.iter()
            .enumerate()
            .filter(|(_, s)| hit(s))
            .map(|(i, _)| (true, i))
            .chain(y.iter().enumerate().filter(|(_, s)| hit(s)).map(|(i, _)| (false, i)))
            .collect()
    }

    pub fn count_occurrences(&self, seq: &[Symbol]) -> usize {
        seq.iter().filter(|s| self.from.contains(s)).count()
    }
}

fn entries_of(s: &ScoringMatrix) -> (usize, impl Fn(usize, usize) -> f64 + '_) {
    let m = s.size();
    (m, move |c: usize, d: usize| s.get(c as Symbol, d as Symbol))
}

/// `T` for changing one `a` into `b`: `T(a, c) = T(c, a) = S(b, c) - S(a, c)`
/// for `c != a`, `T(a, a) = 2 (S(b, a) - S(a, a))`, zero elsewhere, all times
/// `multiplicity`.
pub fn build_single_letter_t(s: &ScoringMatrix, a: char, b: char, multiplicity: u32) -> Result<ScoringMatrix> {
    let spec = PerturbationSpec::single(s.alphabet(), a, b, multiplicity)?;
    spec.build_t(s)
}

/// `T = T_X + T_Y` for changing a letter of `from` into a uniform letter of `to`.
pub fn build_group_change_t(s: &ScoringMatrix, from: &[char], to: &[char]) -> Result<ScoringMatrix> {
    let spec = PerturbationSpec::group(s.alphabet(), from, to)?;
    spec.build_t(s)
}

fn single_letter_t(s: &ScoringMatrix, a: Symbol, b: Symbol, multiplicity: u32) -> Result<ScoringMatrix> {
    let (m, sc) = entries_of(s);
    let (a, b) = (a as usize, b as usize);
    let k = multiplicity as f64;
    let mut e = vec![0.0; m * m];
    if a != b {
        for c in 0..m {
            let v = if c == a {
                2.0 * (sc(b, a) - sc(a, a))
            } else {
                sc(b, c) - sc(a, c)
            };
            e[a * m + c] = k * v;
            e[c * m + a] = k * v;
        }
    }
    ScoringMatrix::new(s.alphabet().clone(), e, false)
}

fn group_change_t(s: &ScoringMatrix, from: &[Symbol], to: &[Symbol]) -> Result<ScoringMatrix> {
    let (m, sc) = entries_of(s);
    let in_from = |u: usize| from.contains(&(u as Symbol));
    // mean score of the replacement letter against v
    let mean_to = |v: usize| to.iter().map(|&t| sc(t as usize, v)).sum::<f64>() / to.len() as f64;
    let mut e = vec![0.0; m * m];
    for u in 0..m {
        for v in 0..m {
            if u == m - 1 && v == m - 1 {
                continue;
            }
            let mut t = 0.0;
            if in_from(u) {
                t += mean_to(v) - sc(u, v);
            }
            if in_from(v) {
                t += mean_to(u) - sc(u, v);
            }
            e[u * m + v] = t;
        }
    }
    ScoringMatrix::new(s.alphabet().clone(), e, false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangeOutcome {
    pub x_new: Vec<Symbol>,
    pub y_new: Vec<Symbol>,
    pub changed_in_x: bool,
    /// 0-based index into the changed string.
    pub position: usize,
    pub old_letter: Symbol,
    pub new_letter: Symbol,
}

/// Apply one random change: a uniform candidate occurrence over both strings,
/// replaced by a uniform letter of the `to` set.
pub fn apply_random_change<R: Rng + ?Sized>(
    x: &[Symbol],
    y: &[Symbol],
    spec: &PerturbationSpec,
    rng: &mut R,
) -> Result<ChangeOutcome> {
    let occ = spec.occurrences(x, y);
    if occ.is_empty() {
        return Err(Error::NoOccurrence);
    }
    let (changed_in_x, position) = occ[rng.random_range(0..occ.len())];
    let new_letter = spec.to[rng.random_range(0..spec.to.len())];
    let mut x_new = x.to_vec();
    let mut y_new = y.to_vec();
    let target = if changed_in_x { &mut x_new } else { &mut y_new };
    let old_letter = target[position];
    target[position] = new_letter;
    Ok(ChangeOutcome {
        x_new,
        y_new,
        changed_in_x,
        position,
        old_letter,
        new_letter,
    })
}

/// `E[L~(S) - L(S) | x, y]` computed exactly: the mean over every candidate
/// occurrence and every replacement letter of the change in optimal score.
pub fn exact_expected_change(
    x: &[Symbol],
    y: &[Symbol],
    spec: &PerturbationSpec,
    s: &ScoringMatrix,
) -> Result<Score> {
    exact_expected_change_capped(x, y, spec, s, DEFAULT_EXACT_CHANGE_CAP)
}

pub fn exact_expected_change_capped(
    x: &[Symbol],
    y: &[Symbol],
    spec: &PerturbationSpec,
    s: &ScoringMatrix,
    cap: usize,
) -> Result<Score> {
    spec.check_alphabet(s.alphabet())?;
    let longest = x.len().max(y.len());
    if longest > cap {
        return Err(Error::SizeCap { len: longest, cap });
    }
    let occ = spec.occurrences(x, y);
    if occ.is_empty() {
        return Err(Error::NoOccurrence);
    }
    let base = optimal_score(x, y, s)?;
    let mut total = Score::ZERO;
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    for &(in_x, pos) in &occ {
        let target = if in_x { &mut xs } else { &mut ys };
        let old = target[pos];
        for &t in &spec.to {
            if t == old {
                continue;
            }
            let target = if in_x { &mut xs } else { &mut ys };
            target[pos] = t;
            total = total + (optimal_score(&xs, &ys, s)? - base);
        }
        let target = if in_x { &mut xs } else { &mut ys };
        target[pos] = old;
    }
    Ok(total.div_int((occ.len() * spec.to.len()) as i64))
}

/// `T_pi(x, y) / (N * multiplicity)` for the traceback-optimal `pi` under `S`:
/// a lower bound on [`exact_expected_change`] for a single-letter flip.
pub fn t_lower_bound(
    x: &[Symbol],
    y: &[Symbol],
    t: &ScoringMatrix,
    s: &ScoringMatrix,
    spec: &PerturbationSpec,
) -> Result<Score> {
    let n = spec.occurrences(x, y).len();
    if n == 0 {
        return Err(Error::NoOccurrence);
    }
    if t.alphabet() != s.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    let pi = optimal_alignment_capped(x, y, s, usize::MAX)?.alignment;
    let t_pi = alignment_score(x, y, &pi, t)?;
    Ok(t_pi.div_int(n as i64 * spec.multiplicity as i64))
}
