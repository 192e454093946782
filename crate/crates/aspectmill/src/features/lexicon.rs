//! Pluggable word lists: cue dictionaries, polarity words, diminishers,
//! intensifiers, prior-scored entries, and negation triggers.
//!
//! File format: UTF-8, one entry per line (`term` or `term<TAB>prior`),
//! `;` comments, and a `kind: <Kind>` header line.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Default negation triggers used when no NegationTrigger lexicon is
/// supplied.
pub const DEFAULT_NEGATION_TRIGGERS: [&str; 5] = ["not", "n't", "nicht", "kein", "keine"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LexiconKind {
    AspectCue,
    CategoryCue,
    PolarityWord,
    Diminisher,
    Intensifier,
    PriorScored,
    NegationTrigger,
}

impl LexiconKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "AspectCue" => Some(Self::AspectCue),
            "CategoryCue" => Some(Self::CategoryCue),
            "PolarityWord" => Some(Self::PolarityWord),
            "Diminisher" => Some(Self::Diminisher),
            "Intensifier" => Some(Self::Intensifier),
            "PriorScored" => Some(Self::PriorScored),
            "NegationTrigger" => Some(Self::NegationTrigger),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::AspectCue => "AspectCue",
            Self::CategoryCue => "CategoryCue",
            Self::PolarityWord => "PolarityWord",
            Self::Diminisher => "Diminisher",
            Self::Intensifier => "Intensifier",
            Self::PriorScored => "PriorScored",
            Self::NegationTrigger => "NegationTrigger",
        }
    }
}

/// One loaded word list. Terms are lowercased and unique; only
/// `PriorScored` entries carry a prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    pub name: String,
    pub kind: LexiconKind,
    pub entries: BTreeMap<String, Option<f64>>,
    /// Stable position in the loaded lexicon list; feature ids of
    /// count/sum features are derived from it.
    pub slot: usize,
}

impl Lexicon {
    pub fn new(name: &str, kind: LexiconKind, terms: &[(&str, Option<f64>)]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (term, prior) in terms {
            validate_entry(kind, term, *prior, name, 0)?;
            if entries.insert(term.to_lowercase(), *prior).is_some() {
                return Err(Error::LexiconParse {
                    path: name.to_string(),
                    line: 0,
                    message: format!("duplicate term {term:?}"),
                });
            }
        }
        Ok(Lexicon {
            name: name.to_string(),
            kind,
            entries,
            slot: 0,
        })
    }

    /// Parses the lexicon file format. `name` is used in diagnostics and
    /// feature naming (usually the file stem).
    pub fn parse(source: &str, name: &str) -> Result<Self> {
        let mut kind: Option<LexiconKind> = None;
        let mut entries: BTreeMap<String, Option<f64>> = BTreeMap::new();
        for (idx, raw_line) in source.lines().enumerate() {
            let line = match raw_line.find(';') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(value) = line.strip_prefix("kind:") {
                let parsed = LexiconKind::parse(value).ok_or_else(|| Error::LexiconParse {
                    path: name.to_string(),
                    line: idx + 1,
                    message: format!("unknown lexicon kind {:?}", value.trim()),
                })?;
                if kind.replace(parsed).is_some() {
                    return Err(Error::LexiconParse {
                        path: name.to_string(),
                        line: idx + 1,
                        message: "duplicate kind header".into(),
                    });
                }
                continue;
            }
            let kind = kind.ok_or_else(|| Error::LexiconParse {
                path: name.to_string(),
                line: idx + 1,
                message: "entry before the `kind:` header".into(),
            })?;
            let (term, prior) = match line.split_once('\t') {
                Some((term, prior_str)) => {
                    let prior: f64 =
                        prior_str.trim().parse().map_err(|_| Error::LexiconParse {
                            path: name.to_string(),
                            line: idx + 1,
                            message: format!("invalid prior {:?}", prior_str.trim()),
                        })?;
                    (term.trim(), Some(prior))
                }
                None => (line, None),
            };
            validate_entry(kind, term, prior, name, idx + 1)?;
            if entries.insert(term.to_lowercase(), prior).is_some() {
                return Err(Error::LexiconParse {
                    path: name.to_string(),
                    line: idx + 1,
                    message: format!("duplicate term {term:?}"),
                });
            }
        }
        let kind = kind.ok_or_else(|| Error::LexiconParse {
            path: name.to_string(),
            line: 0,
            message: "missing `kind:` header".into(),
        })?;
        Ok(Lexicon {
            name: name.to_string(),
            kind,
            entries,
            slot: 0,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading lexicon {}", path.display()), e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Lexicon::parse(&source, &name)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(token)
    }

    pub fn prior(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied().flatten()
    }

    /// Canonical serialization digested into the bundle for provenance.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(format!("kind: {}\n", self.kind.as_str()));
        for (term, prior) in &self.entries {
            match prior {
                Some(p) => hasher.update(format!("{term}\t{p}\n")),
                None => hasher.update(format!("{term}\n")),
            }
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn validate_entry(
    kind: LexiconKind,
    term: &str,
    prior: Option<f64>,
    name: &str,
    line: usize,
) -> Result<()> {
    if term.is_empty() {
        return Err(Error::LexiconParse {
            path: name.to_string(),
            line,
            message: "empty term".into(),
        });
    }
    match (kind, prior) {
        (LexiconKind::PriorScored, Some(p)) if p.is_finite() => Ok(()),
        (LexiconKind::PriorScored, Some(_)) => Err(Error::LexiconParse {
            path: name.to_string(),
            line,
            message: format!("non-finite prior for {term:?}"),
        }),
        (LexiconKind::PriorScored, None) => Err(Error::LexiconParse {
            path: name.to_string(),
            line,
            message: format!("PriorScored entry {term:?} is missing its prior"),
        }),
        (_, Some(_)) => Err(Error::LexiconParse {
            path: name.to_string(),
            line,
            message: format!("{} entry {term:?} must not carry a prior", kind.as_str()),
        }),
        (_, None) => Ok(()),
    }
}

/// Loads every `*.lex` file in `dir`, sorted by (kind, name), and assigns
/// stable slots.
pub fn load_lexicon_dir(dir: impl AsRef<Path>) -> Result<Vec<Lexicon>> {
    let dir = dir.as_ref();
    let read = std::fs::read_dir(dir)
        .map_err(|e| Error::io(format!("reading lexicon directory {}", dir.display()), e))?;
    let mut lexicons = Vec::new();
    for entry in read {
        let entry = entry
            .map_err(|e| Error::io(format!("reading lexicon directory {}", dir.display()), e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("lex") {
            lexicons.push(Lexicon::load(&path)?);
        }
    }
    assign_slots(&mut lexicons);
    Ok(lexicons)
}

/// Sorts by (kind, name) and numbers the slots. Call after assembling a
/// lexicon list by hand.
pub fn assign_slots(lexicons: &mut [Lexicon]) {
    lexicons.sort_by(|a, b| (a.kind, &a.name).cmp(&(b.kind, &b.name)));
    for (slot, lexicon) in lexicons.iter_mut().enumerate() {
        lexicon.slot = slot;
    }
}

/// The active negation trigger set: entries of every NegationTrigger
/// lexicon, or the built-in defaults when none is present.
pub fn negation_triggers(lexicons: &[Lexicon]) -> BTreeSet<String> {
    let mut triggers: BTreeSet<String> = lexicons
        .iter()
        .filter(|l| l.kind == LexiconKind::NegationTrigger)
        .flat_map(|l| l.entries.keys().cloned())
        .collect();
    if triggers.is_empty() {
        triggers = DEFAULT_NEGATION_TRIGGERS
            .iter()
            .map(|s| s.to_string())
            .collect();
    }
    triggers
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kinds_terms_and_priors() {
        let source = "; sample\nkind: PriorScored\ngut\t1.0\nschlecht\t-1.0\nok\t0\n";
        let lex = Lexicon::parse(source, "priors").unwrap();
        assert_eq!(lex.kind, LexiconKind::PriorScored);
        assert_eq!(lex.prior("gut"), Some(1.0));
        assert_eq!(lex.prior("schlecht"), Some(-1.0));
        assert_eq!(lex.entries["ok"], Some(0.0));
    }

    #[test]
    fn terms_are_lowercased() {
        let lex = Lexicon::parse("kind: PolarityWord\nGut\n", "p").unwrap();
        assert!(lex.contains("gut"));
        assert!(!lex.contains("Gut"));
    }

    #[test]
    fn missing_header_is_an_error() {
        assert!(Lexicon::parse("gut\n", "p").is_err());
    }

    #[test]
    fn prior_rules_are_enforced_per_kind() {
        assert!(Lexicon::parse("kind: PolarityWord\ngut\t1.0\n", "p").is_err());
        assert!(Lexicon::parse("kind: PriorScored\ngut\n", "p").is_err());
    }

    #[test]
    fn duplicate_terms_are_rejected() {
        let err = Lexicon::parse("kind: PolarityWord\ngut\nGUT\n", "p").unwrap_err();
        assert!(matches!(err, Error::LexiconParse { line: 3, .. }));
    }

    #[test]
    fn negation_triggers_default_when_absent() {
        let triggers = negation_triggers(&[]);
        assert!(triggers.contains("nicht"));
        assert!(triggers.contains("n't"));
        assert_eq!(triggers.len(), 5);
    }

    #[test]
    fn negation_triggers_from_lexicon_replace_defaults() {
        let lex = Lexicon::new("neg", LexiconKind::NegationTrigger, &[("never", None)]).unwrap();
        let triggers = negation_triggers(&[lex]);
        assert_eq!(triggers.len(), 1);
        assert!(triggers.contains("never"));
    }

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        let a = Lexicon::new("p", LexiconKind::PolarityWord, &[("gut", None)]).unwrap();
        let b = Lexicon::new("p", LexiconKind::PolarityWord, &[("gut", None)]).unwrap();
        let c = Lexicon::new("p", LexiconKind::PolarityWord, &[("schlecht", None)]).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn slots_follow_kind_then_name() {
        let mut lexicons = vec![
            Lexicon::new("z", LexiconKind::AspectCue, &[("a", None)]).unwrap(),
            Lexicon::new("a", LexiconKind::PolarityWord, &[("b", None)]).unwrap(),
            Lexicon::new("a", LexiconKind::AspectCue, &[("c", None)]).unwrap(),
        ];
        assign_slots(&mut lexicons);
        let order: Vec<(&str, usize)> =
            lexicons.iter().map(|l| (l.name.as_str(), l.slot)).collect();
        assert_eq!(order, vec![("a", 0), ("z", 1), ("a", 2)]);
    }
}
