//! INI experiment files.
//!
//! ```ini
//! [alphabet]
//! letters = 0 1
//! gap = -
//!
//! [distribution]
//! probs = 0.2 0.8
//!
//! [scoring]
//! matrix = id            # id | match_mismatch | blastz | file
//! gap_penalty = 6
//!
//! [perturbation]
//! kind = single
//! from = 0
//! to = 1
//! multiplicity = 2
//!
//! [run]
//! eps = 0.5
//! n = 10000
//! replicates = 20
//! seed = 1
//! ```
//!
//! Unknown sections and keys are rejected. Relative matrix file paths are
//! resolved against the directory of the config file.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::error::{Error, Result};
use crate::model::{Alphabet, LetterDistribution, ScoringMatrix, DEFAULT_GAP};
use crate::montecarlo::{ExperimentConfig, LambdaReferences};
use crate::perturbation::{ChangeKind, PerturbationSpec, DEFAULT_EXACT_CHANGE_CAP};
use crate::alignment::DEFAULT_TRACEBACK_CAP;

/// Largest `n` accepted for score-only runs.
pub const SCORE_ONLY_MAX_N: usize = 200_000;

pub const SEED_ENV: &str = "ALIGNFLUCT_SEED";

const SCHEMA: &[(&str, &[&str])] = &[
    ("alphabet", &["letters", "gap"]),
    ("distribution", &["probs"]),
    ("scoring", &["matrix", "match", "mismatch", "gap_penalty", "file"]),
    ("perturbation", &["kind", "from", "to", "multiplicity"]),
    (
        "run",
        &[
            "eps",
            "n",
            "replicates",
            "seed",
            "x",
            "reference_pvalue",
            "n_list",
            "workers",
            "exact_change_cap",
        ],
    ),
    ("events", &["lambda_s", "lambda_smt", "delta"]),
];

/// Everything an experiment file can say.
#[derive(Clone, Debug, PartialEq)]
pub struct FileConfig {
    pub experiment: ExperimentConfig,
    pub seed_in_file: Option<u64>,
    pub x: Option<f64>,
    pub reference_pvalue: Option<f64>,
    pub n_list: Vec<usize>,
    pub workers: Option<usize>,
    pub exact_change_cap: usize,
    pub events: Option<LambdaReferences>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<FileConfig> {
        let ini = Ini::load_from_str_noescape(text).map_err(|e| Error::Parse(e.to_string()))?;
        let doc = Doc::new(&ini)?;

        let letters = doc.req("alphabet", "letters")?;
        let letters = parse_chars(&letters).map_err(|m| Error::config("alphabet.letters", m))?;
        let gap = match doc.opt("alphabet", "gap") {
            None => DEFAULT_GAP,
            Some(g) => single_char(&g).map_err(|m| Error::config("alphabet.gap", m))?,
        };
        let alphabet = Alphabet::new(letters, gap)?;

        let distribution = match doc.opt("distribution", "probs") {
            None => LetterDistribution::uniform(&alphabet),
            Some(p) => LetterDistribution::new(&alphabet, parse_list(&p, "distribution.probs")?)?,
        };

        let scoring = scoring(&doc, &alphabet, base_dir)?;

        let kind = match doc.req("perturbation", "kind")?.as_str() {
            "single" => ChangeKind::Single,
            "group" => ChangeKind::Group,
            other => {
                return Err(Error::config(
                    "perturbation.kind",
                    format!("expected single or group, got {other:?}"),
                ))
            }
        };
        let from = parse_chars(&doc.req("perturbation", "from")?)
            .map_err(|m| Error::config("perturbation.from", m))?;
        let to = parse_chars(&doc.req("perturbation", "to")?)
            .map_err(|m| Error::config("perturbation.to", m))?;
        let multiplicity: u32 = doc.num("perturbation", "multiplicity")?.unwrap_or(1);
        if kind == ChangeKind::Single && (from.len() != 1 || to.len() != 1) {
            return Err(Error::config("perturbation.from", "a single change takes one letter each"));
        }
        let perturbation = PerturbationSpec::new(&alphabet, kind, &from, &to, multiplicity)?;

        let eps: f64 = doc.num("run", "eps")?.ok_or_else(|| missing("run.eps"))?;
        let n: usize = doc.num("run", "n")?.ok_or_else(|| missing("run.n"))?;
        let replicates: usize = doc.num("run", "replicates")?.unwrap_or(1);
        let seed_in_file: Option<u64> = doc.num("run", "seed")?;
        let n_list = match doc.opt("run", "n_list") {
            None => Vec::new(),
            Some(v) => parse_list(&v, "run.n_list")?,
        };
        let exact_change_cap = doc.num("run", "exact_change_cap")?.unwrap_or(DEFAULT_EXACT_CHANGE_CAP);
        if exact_change_cap > DEFAULT_TRACEBACK_CAP {
            return Err(Error::config(
                "run.exact_change_cap",
                format!("tracebacks are limited to n <= {DEFAULT_TRACEBACK_CAP}"),
            ));
        }

        let events = if doc.has_section("events") {
            Some(LambdaReferences {
                lambda_s: doc.num("events", "lambda_s")?.ok_or_else(|| missing("events.lambda_s"))?,
                lambda_smt: doc.num("events", "lambda_smt")?.ok_or_else(|| missing("events.lambda_smt"))?,
                delta: doc.num("events", "delta")?.unwrap_or(1.0),
            })
        } else {
            None
        };

        let experiment = ExperimentConfig {
            alphabet,
            distribution,
            scoring,
            perturbation,
            eps,
            n,
            replicates,
            master_seed: seed_in_file.unwrap_or(0),
        };
        experiment.validate()?;
        if n > SCORE_ONLY_MAX_N {
            return Err(Error::config(
                "run.n",
                format!("n = {n} exceeds the score-only limit of {SCORE_ONLY_MAX_N}"),
            ));
        }
        Ok(FileConfig {
            experiment,
            seed_in_file,
            x: doc.num("run", "x")?,
            reference_pvalue: doc.num("run", "reference_pvalue")?,
            n_list,
            workers: doc.num("run", "workers")?,
            exact_change_cap,
            events,
        })
    }

    /// Seed from the command line, else `ALIGNFLUCT_SEED`, else the file, else 0.
    pub fn resolve_seed(&mut self, flag: Option<u64>) -> Result<u64> {
        let seed = match flag {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::config(SEED_ENV, format!("not an unsigned integer: {v:?}")))?,
                Err(_) => self.seed_in_file.unwrap_or(0),
            },
        };
        self.experiment.master_seed = seed;
        Ok(seed)
    }
}

fn scoring(doc: &Doc, alphabet: &Alphabet, base_dir: &Path) -> Result<ScoringMatrix> {
    let kind = doc.req("scoring", "matrix")?;
    let delta = || -> Result<f64> {
        doc.num("scoring", "gap_penalty")?
            .ok_or_else(|| missing("scoring.gap_penalty"))
    };
    match kind.as_str() {
        "id" => {
            let mismatch = doc.num("scoring", "mismatch")?.unwrap_or(0.0);
            ScoringMatrix::match_mismatch(alphabet.clone(), 1.0, mismatch, delta()?)
        }
        "match_mismatch" => ScoringMatrix::match_mismatch(
            alphabet.clone(),
            doc.num("scoring", "match")?.ok_or_else(|| missing("scoring.match"))?,
            doc.num("scoring", "mismatch")?.ok_or_else(|| missing("scoring.mismatch"))?,
            delta()?,
        ),
        "blastz" => {
            let m = ScoringMatrix::blastz(delta()?);
            if m.alphabet().letters() != alphabet.letters() {
                return Err(Error::config("alphabet.letters", "blastz needs letters A T C G in that order"));
            }
            Ok(m)
        }
        "file" => {
            let rel = doc.req("scoring", "file")?;
            let path: PathBuf = base_dir.join(&rel);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::config("scoring.file", format!("cannot read {}: {e}", path.display()))
            })?;
            let m = ScoringMatrix::from_text(&text)?;
            if m.alphabet().letters() != alphabet.letters() {
                return Err(Error::AlphabetMismatch);
            }
            Ok(m)
        }
        other => Err(Error::config(
            "scoring.matrix",
            format!("expected id, match_mismatch, blastz or file, got {other:?}"),
        )),
    }
}

fn missing(key: &str) -> Error {
    Error::config(key, "required key is missing")
}

struct Doc<'a> {
    ini: &'a Ini,
    sections: HashSet<&'a str>,
}

impl<'a> Doc<'a> {
    fn new(ini: &'a Ini) -> Result<Self> {
        let mut sections = HashSet::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::config(k, "key outside of any section"));
                }
                continue;
            };
            let allowed = SCHEMA
                .iter()
                .find(|(s, _)| *s == name)
                .map(|(_, keys)| *keys)
                .ok_or_else(|| Error::config(name, "unknown section"))?;
            if !sections.insert(name) {
                return Err(Error::config(name, "section appears twice"));
            }
            let mut seen = HashSet::new();
            for (k, _) in props.iter() {
                let full = format!("{name}.{k}");
                if !allowed.contains(&k) {
                    return Err(Error::config(full, "unknown key"));
                }
                if !seen.insert(k) {
                    return Err(Error::config(full, "key appears twice"));
                }
            }
        }
        Ok(Doc { ini, sections })
    }

    fn has_section(&self, s: &str) -> bool {
        self.sections.contains(s)
    }

    fn opt(&self, section: &str, key: &str) -> Option<String> {
        let raw = self.ini.section(Some(section))?.get(key)?;
        let v = raw.split('#').next().unwrap_or("").trim();
        (!v.is_empty()).then(|| v.to_string())
    }

    fn req(&self, section: &str, key: &str) -> Result<String> {
        self.opt(section, key)
            .ok_or_else(|| missing(&format!("{section}.{key}")))
    }

    fn num<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        self.opt(section, key)
            .map(|v| {
                parse_number(&v).ok_or_else(|| {
                    Error::config(format!("{section}.{key}"), format!("not a valid number: {v:?}"))
                })
            })
            .transpose()
    }
}

/// Also accepts integers written as `2e5`.
fn parse_number<T: FromStr>(v: &str) -> Option<T> {
    if let Ok(x) = v.parse() {
        return Some(x);
    }
    let f: f64 = v.parse().ok()?;
    if f.fract() == 0.0 && f.abs() < 1e15 {
        format!("{}", f as i64).parse().ok()
    } else {
        None
    }
}

fn tokens(v: &str) -> impl Iterator<Item = &str> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

fn parse_list<T: FromStr>(v: &str, key: &str) -> Result<Vec<T>> {
    tokens(v)
        .map(|t| parse_number(t).ok_or_else(|| Error::config(key, format!("not a valid number: {t:?}"))))
        .collect()
}

fn single_char(t: &str) -> std::result::Result<char, String> {
    let mut it = t.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(format!("expected a single character, got {t:?}")),
    }
}

fn parse_chars(v: &str) -> std::result::Result<Vec<char>, String> {
    tokens(v).map(single_char).collect()
}
