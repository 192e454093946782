//! The four classifier arrangements and the serializable bundle that
//! holds a trained system.
//!
//! * Flat: every category, aspect, and polarity detector runs and trains
//!   independently.
//! * Hierarchical: aspect detectors train on, and run for, only the
//!   sentences of their own category; polarity cascades behind a
//!   polar-vs-neutral gate.
//! * Propagation: category predictions are appended as features to the
//!   aspect detectors, which always run and may vote against the
//!   category level.
//! * Aspect-specific polarity: the hierarchical path picks aspects, then
//!   polarity is classified over a token window around each aspect's
//!   trigger terms, so different aspects in one sentence can receive
//!   different polarities.

mod predict;
mod targets;
mod train;
mod triggers;

pub use predict::{
    augment_with_categories, check_gating, infer_categories, predict_aspect_polarity,
    predict_flat, predict_hierarchical, predict_propagation,
};
pub use targets::{build_targets, SentenceGold};
pub use train::{
    report_training, train_aspect_polarity, train_flat, train_hierarchical, train_propagation,
    LabelTrainStats,
};
pub use triggers::{mutual_information, select_trigger_terms};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::features::{Lexicon, LexiconKind, Vocabulary};
use crate::learner::{LinearModel, TrainConfig};
use crate::taxonomy::{PolarityLabel, Taxonomy};
use crate::{Error, Result};

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    Flat,
    Hierarchical,
    Propagation,
    AspectPolarity,
}

impl Architecture {
    pub fn as_str(&self) -> &'static str {
        match self {
            Architecture::Flat => "flat",
            Architecture::Hierarchical => "hierarchical",
            Architecture::Propagation => "propagation",
            Architecture::AspectPolarity => "aspect-polarity",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Architecture {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "flat" => Ok(Architecture::Flat),
            "hier" | "hierarchical" => Ok(Architecture::Hierarchical),
            "prop" | "propagation" => Ok(Architecture::Propagation),
            "aspect-polarity" => Ok(Architecture::AspectPolarity),
            other => Err(format!(
                "unknown architecture {other:?} (expected flat|hier|prop|aspect-polarity)"
            )),
        }
    }
}

/// Token window radius for aspect-specific polarity; `inf` means the
/// whole sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowSize {
    Tokens(usize),
    #[default]
    Infinite,
}

impl fmt::Display for WindowSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSize::Tokens(n) => write!(f, "{n}"),
            WindowSize::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for WindowSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "INF" | "infinite" => Ok(WindowSize::Infinite),
            n => n
                .parse::<usize>()
                .map(WindowSize::Tokens)
                .map_err(|_| format!("window must be a non-negative integer or 'inf', got {s:?}")),
        }
    }
}

impl Serialize for WindowSize {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for WindowSize {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The three sentence-level polarity detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarityModels {
    /// Polar vs neutral gate.
    pub polar: LinearModel,
    pub positive: LinearModel,
    pub negative: LinearModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconDigest {
    pub name: String,
    pub kind: LexiconKind,
    pub sha256: String,
}

/// Everything needed to predict: architecture, models, vocabulary,
/// lexicons (plus their digests for provenance), taxonomy, and — for the
/// aspect-specific arrangement — per-aspect trigger terms and the window
/// size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub architecture: Architecture,
    pub taxonomy: Taxonomy,
    pub vocabulary: Vocabulary,
    pub lexicons: Vec<Lexicon>,
    pub lexicon_digests: Vec<LexiconDigest>,
    pub category_models: BTreeMap<String, LinearModel>,
    pub aspect_models: BTreeMap<String, LinearModel>,
    pub polarity_models: PolarityModels,
    /// Aspect-specific arrangement only; empty otherwise.
    pub trigger_terms: BTreeMap<String, Vec<String>>,
    pub window: WindowSize,
    pub train_config: TrainConfig,
}

#[derive(Serialize, Deserialize)]
struct BundleEnvelope {
    format_version: u32,
    bundle: serde_json::Value,
}

impl ModelBundle {
    /// Serializes into the versioned single-file container.
    pub fn to_json(&self) -> String {
        let envelope = BundleEnvelope {
            format_version: BUNDLE_FORMAT_VERSION,
            bundle: serde_json::to_value(self).expect("serializable bundle"),
        };
        serde_json::to_string(&envelope).expect("serializable envelope")
    }

    /// Parses the container, refusing unknown format versions.
    pub fn from_json(raw: &str) -> Result<Self> {
        let envelope: BundleEnvelope =
            serde_json::from_str(raw).map_err(|e| Error::json("parsing bundle", e))?;
        if envelope.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::BundleVersion {
                found: envelope.format_version,
                supported: BUNDLE_FORMAT_VERSION,
            });
        }
        let mut bundle: ModelBundle = serde_json::from_value(envelope.bundle)
            .map_err(|e| Error::json("parsing bundle contents", e))?;
        bundle.taxonomy.reindex()?;
        bundle.vocabulary.reindex();
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|e| Error::io(format!("writing bundle {}", path.display()), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading bundle {}", path.display()), e))?;
        Self::from_json(&raw)
    }

    /// Dispatches to the architecture's prediction routine.
    pub fn predict(&self, text: &str) -> SentencePrediction {
        match self.architecture {
            Architecture::Flat => predict_flat(self, text).expect("architecture checked"),
            Architecture::Hierarchical => {
                predict_hierarchical(self, text).expect("architecture checked")
            }
            Architecture::Propagation => {
                predict_propagation(self, text).expect("architecture checked")
            }
            Architecture::AspectPolarity => {
                predict_aspect_polarity(self, text).expect("architecture checked")
            }
        }
    }

    pub(crate) fn expect_architecture(&self, wanted: Architecture) -> Result<()> {
        if self.architecture == wanted {
            Ok(())
        } else {
            Err(Error::WrongArchitecture {
                trained: self.architecture.to_string(),
                used: wanted.to_string(),
            })
        }
    }
}

/// Digests for a lexicon list, sorted like the lexicons themselves.
pub fn lexicon_digests(lexicons: &[Lexicon]) -> Vec<LexiconDigest> {
    lexicons
        .iter()
        .map(|l| LexiconDigest {
            name: l.name.clone(),
            kind: l.kind,
            sha256: l.digest(),
        })
        .collect()
}

/// Polarity part of a prediction: one label for the whole sentence, or
/// one label per predicted aspect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolarityOutcome {
    Sentence(PolarityLabel),
    PerAspect(BTreeMap<String, PolarityLabel>),
}

/// Prediction for one sentence. `Mixed` is never emitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentencePrediction {
    pub categories: BTreeSet<String>,
    pub aspects: BTreeSet<String>,
    pub polarity: PolarityOutcome,
}

impl SentencePrediction {
    /// Sentence-level polarity label, when one exists.
    pub fn sentence_polarity(&self) -> Option<PolarityLabel> {
        match &self.polarity {
            PolarityOutcome::Sentence(label) => Some(*label),
            PolarityOutcome::PerAspect(_) => None,
        }
    }
}
