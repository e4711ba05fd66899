use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letter code: index into [`Alphabet::letters`]. The gap has code `len()`.
pub type Symbol = u8;

/// Ordered letter set plus a distinguished gap symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AlphabetRepr", into = "AlphabetRepr")]
pub struct Alphabet {
    letters: Vec<char>,
    gap: char,
}

#[derive(Serialize, Deserialize)]
struct AlphabetRepr {
    letters: Vec<char>,
    gap: char,
}

impl TryFrom<AlphabetRepr> for Alphabet {
    type Error = Error;
    fn try_from(r: AlphabetRepr) -> Result<Self> {
        Alphabet::new(r.letters, r.gap)
    }
}

impl From<Alphabet> for AlphabetRepr {
    fn from(a: Alphabet) -> Self {
        AlphabetRepr {
            letters: a.letters,
            gap: a.gap,
        }
    }
}

pub const DEFAULT_GAP: char = '-';

impl Alphabet {
    pub fn new(letters: Vec<char>, gap: char) -> Result<Self> {
        if letters.len() < 2 {
            return Err(Error::InvalidAlphabet(
                "at least two letters are required".into(),
            ));
        }
        if letters.len() >= Symbol::MAX as usize {
            return Err(Error::InvalidAlphabet("too many letters".into()));
        }
        for (i, c) in letters.iter().enumerate() {
            if c.is_whitespace() {
                return Err(Error::InvalidAlphabet("letters may not be whitespace".into()));
            }
            if letters[..i].contains(c) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter {c:?}")));
            }
        }
        if letters.contains(&gap) {
            return Err(Error::InvalidAlphabet(format!(
                "gap symbol {gap:?} is also a letter"
            )));
        }
        Ok(Alphabet { letters, gap })
    }

    pub fn binary() -> Self {
        Alphabet::new(vec!['0', '1'], DEFAULT_GAP).unwrap()
    }

    /// The DNA alphabet in the row order A, T, C, G.
    pub fn dna() -> Self {
        Alphabet::new(vec!['A', 'T', 'C', 'G'], DEFAULT_GAP).unwrap()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of symbols including the gap.
    pub fn augmented_len(&self) -> usize {
        self.letters.len() + 1
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn gap(&self) -> char {
        self.gap
    }

    pub fn gap_symbol(&self) -> Symbol {
        self.letters.len() as Symbol
    }

    pub fn index_of(&self, c: char) -> Option<Symbol> {
        self.letters.iter().position(|&l| l == c).map(|i| i as Symbol)
    }

    pub fn letter(&self, s: Symbol) -> Option<char> {
        if (s as usize) < self.letters.len() {
            Some(self.letters[s as usize])
        } else if s as usize == self.letters.len() {
            Some(self.gap)
        } else {
            None
        }
    }

    pub fn encode(&self, text: &str) -> Result<Vec<Symbol>> {
        text.chars()
            .map(|c| {
                self.index_of(c)
                    .ok_or_else(|| Error::SymbolOutsideAlphabet(c.to_string()))
            })
            .collect()
    }

    pub fn decode(&self, seq: &[Symbol]) -> String {
        seq.iter()
            .map(|&s| self.letter(s).unwrap_or('?'))
            .collect()
    }

    /// Reject any code that is not a letter (gaps included).
    pub fn check(&self, seq: &[Symbol]) -> Result<()> {
        match seq.iter().find(|&&s| s as usize >= self.letters.len()) {
            Some(&s) => Err(Error::SymbolOutsideAlphabet(match self.letter(s) {
                Some(c) => c.to_string(),
                None => format!("#{s}"),
            })),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: String = self.letters.iter().collect();
        write!(f, "{{{letters}}} gap {:?}", self.gap)
    }
}
