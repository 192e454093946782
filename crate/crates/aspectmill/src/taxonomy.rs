//! Two-level label hierarchy: categories containing aspects, plus the
//! polarity label space.
//!
//! A taxonomy is configuration, not code. The engine ships a default
//! hierarchy for distance-education reviews, but any two-level hierarchy
//! loaded from a config file works the same way.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Bundled default hierarchy: 8 categories, 32 aspects.
pub const DEFAULT_TAXONOMY_SRC: &str = include_str!("../fixtures/default.taxonomy");

/// Sentiment orientation of a mention.
///
/// `Mixed` appears only in annotations (score 99). Classifiers never emit
/// it; when building training targets it expands into a positive and a
/// negative signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarityLabel {
    Positive,
    Negative,
    Neutral,
    Mixed,
}

impl fmt::Display for PolarityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PolarityLabel::Positive => "positive",
            PolarityLabel::Negative => "negative",
            PolarityLabel::Neutral => "neutral",
            PolarityLabel::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

/// Maps an annotation score to its polarity label.
///
/// Scores range over `[-9, 9]`; the sentinel `99` marks a mixed mention.
pub fn polarity_from_score(score: i32) -> Result<PolarityLabel> {
    match score {
        99 => Ok(PolarityLabel::Mixed),
        0 => Ok(PolarityLabel::Neutral),
        1..=9 => Ok(PolarityLabel::Positive),
        -9..=-1 => Ok(PolarityLabel::Negative),
        other => Err(Error::ScoreOutOfRange(other)),
    }
}

/// One coarse label grouping at least one aspect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub aspects: Vec<String>,
}

/// Validated two-level hierarchy.
///
/// Immutable after load; category names are unique and aspect names are
/// globally unique across categories, so every aspect has exactly one
/// owning category.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Taxonomy {
    pub categories: Vec<Category>,
    /// Content tag derived from the canonical form; used to detect
    /// bundle/corpus mismatches.
    pub version: String,
    #[serde(skip)]
    aspect_to_category: BTreeMap<String, usize>,
}

impl PartialEq for Taxonomy {
    fn eq(&self, other: &Self) -> bool {
        self.categories == other.categories
    }
}

impl Taxonomy {
    /// Builds and validates a taxonomy from category definitions.
    pub fn new(categories: Vec<Category>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::EmptyTaxonomy);
        }
        let mut seen_categories = BTreeMap::new();
        let mut aspect_to_category = BTreeMap::new();
        for (idx, category) in categories.iter().enumerate() {
            if seen_categories.insert(category.name.clone(), idx).is_some() {
                return Err(Error::DuplicateName {
                    kind: "category",
                    name: category.name.clone(),
                });
            }
            if category.aspects.is_empty() {
                return Err(Error::EmptyCategory(category.name.clone()));
            }
            for aspect in &category.aspects {
                if aspect_to_category.insert(aspect.clone(), idx).is_some() {
                    return Err(Error::DuplicateName {
                        kind: "aspect",
                        name: aspect.clone(),
                    });
                }
            }
        }
        let mut taxonomy = Taxonomy {
            categories,
            version: String::new(),
            aspect_to_category,
        };
        taxonomy.version = taxonomy.content_tag();
        Ok(taxonomy)
    }

    /// Parses the line-oriented config format.
    ///
    /// `# <name>` opens a category, every following non-empty line names
    /// one aspect, and `;` starts a comment. Names are matched
    /// case-sensitively after trimming surrounding whitespace.
    pub fn parse(source: &str) -> Result<Self> {
        let mut categories: Vec<Category> = Vec::new();
        for (idx, raw_line) in source.lines().enumerate() {
            let line = match raw_line.find(';') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('#') {
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::TaxonomyParse {
                        line: idx + 1,
                        message: "category marker '#' without a name".into(),
                    });
                }
                categories.push(Category {
                    name: name.to_string(),
                    aspects: Vec::new(),
                });
            } else {
                match categories.last_mut() {
                    Some(category) => category.aspects.push(line.to_string()),
                    None => {
                        return Err(Error::TaxonomyParse {
                            line: idx + 1,
                            message: format!("aspect {line:?} appears before any category"),
                        })
                    }
                }
            }
        }
        Taxonomy::new(categories)
    }

    /// Loads and validates a taxonomy config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let source = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading taxonomy {}", path.display()), e))?;
        Taxonomy::parse(&source)
    }

    /// The bundled default hierarchy (8 categories, 32 aspects).
    pub fn bundled_default() -> Self {
        Taxonomy::parse(DEFAULT_TAXONOMY_SRC).expect("bundled taxonomy is valid")
    }

    /// Canonical config form: categories and aspects in order, single
    /// trailing newline, comments dropped.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        for category in &self.categories {
            out.push_str("# ");
            out.push_str(&category.name);
            out.push('\n');
            for aspect in &category.aspects {
                out.push_str(aspect);
                out.push('\n');
            }
        }
        out
    }

    /// Resolves the unique category owning `aspect`.
    pub fn category_of(&self, aspect: &str) -> Result<&str> {
        let aspect = aspect.trim();
        self.aspect_to_category
            .get(aspect)
            .map(|&idx| self.categories[idx].name.as_str())
            .ok_or_else(|| Error::UnknownAspect(aspect.to_string()))
    }

    pub fn contains_aspect(&self, aspect: &str) -> bool {
        self.aspect_to_category.contains_key(aspect.trim())
    }

    pub fn category_names(&self) -> impl Iterator<Item = &str> {
        self.categories.iter().map(|c| c.name.as_str())
    }

    /// All aspects in category order.
    pub fn aspect_names(&self) -> impl Iterator<Item = &str> {
        self.categories
            .iter()
            .flat_map(|c| c.aspects.iter().map(|a| a.as_str()))
    }

    pub fn category_count(&self) -> usize {
        self.categories.len()
    }

    pub fn aspect_count(&self) -> usize {
        self.categories.iter().map(|c| c.aspects.len()).sum()
    }

    /// Position of `category` in the declared order.
    pub fn category_index(&self, category: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.name == category)
    }

    fn content_tag(&self) -> String {
        let digest = Sha256::digest(self.to_canonical_string().as_bytes());
        let mut tag = String::with_capacity(12);
        for byte in digest.iter().take(6) {
            tag.push_str(&format!("{byte:02x}"));
        }
        tag
    }

    /// Restores the aspect lookup index after deserialization.
    pub(crate) fn reindex(&mut self) -> Result<()> {
        let rebuilt = Taxonomy::new(std::mem::take(&mut self.categories))?;
        *self = rebuilt;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_has_8_categories_and_32_aspects() {
        let taxonomy = Taxonomy::bundled_default();
        assert_eq!(taxonomy.category_count(), 8);
        assert_eq!(taxonomy.aspect_count(), 32);
    }

    #[test]
    fn category_lookup_follows_grouping() {
        let taxonomy = Taxonomy::bundled_default();
        assert_eq!(
            taxonomy.category_of("Supervision").unwrap(),
            "Support and Organization"
        );
        assert_eq!(taxonomy.category_of("Flexibility").unwrap(), "Personal");
        assert_eq!(taxonomy.category_of("Scholarships").unwrap(), "Tuition");
        assert!(matches!(
            taxonomy.category_of("NoSuchAspect"),
            Err(Error::UnknownAspect(_))
        ));
    }

    #[test]
    fn every_aspect_round_trips_through_its_category() {
        let taxonomy = Taxonomy::bundled_default();
        for aspect in taxonomy.aspect_names() {
            let category = taxonomy.category_of(aspect).unwrap();
            let owner = taxonomy
                .categories
                .iter()
                .find(|c| c.name == category)
                .unwrap();
            assert!(owner.aspects.iter().any(|a| a == aspect));
        }
    }

    #[test]
    fn canonical_form_is_byte_identical_to_bundled_config() {
        let taxonomy = Taxonomy::bundled_default();
        assert_eq!(taxonomy.to_canonical_string(), DEFAULT_TAXONOMY_SRC);
    }

    #[test]
    fn empty_config_is_rejected() {
        assert!(matches!(Taxonomy::parse(""), Err(Error::EmptyTaxonomy)));
        assert!(matches!(
            Taxonomy::parse("; only a comment\n"),
            Err(Error::EmptyTaxonomy)
        ));
    }

    #[test]
    fn empty_category_is_rejected() {
        let err = Taxonomy::parse("# Tuition\n# Personal\nFlexibility\n").unwrap_err();
        assert!(matches!(err, Error::EmptyCategory(name) if name == "Tuition"));
    }

    #[test]
    fn duplicate_names_are_rejected_with_offender() {
        let err = Taxonomy::parse("# A\nx\n# A\ny\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateName { kind: "category", name } if name == "A"));
        let err = Taxonomy::parse("# A\nx\n# B\nx\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateName { kind: "aspect", name } if name == "x"));
    }

    #[test]
    fn aspect_before_category_reports_line() {
        let err = Taxonomy::parse("; header\nOrphan\n").unwrap_err();
        assert!(matches!(err, Error::TaxonomyParse { line: 2, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let source = "; file comment\n# Tuition ; inline\n\nBasic Tuition\nScholarships ; cheap\n";
        let taxonomy = Taxonomy::parse(source).unwrap();
        assert_eq!(taxonomy.category_of("Scholarships").unwrap(), "Tuition");
        assert_eq!(taxonomy.aspect_count(), 2);
    }

    #[test]
    fn polarity_from_score_covers_the_whole_range() {
        assert_eq!(polarity_from_score(9).unwrap(), PolarityLabel::Positive);
        assert_eq!(polarity_from_score(1).unwrap(), PolarityLabel::Positive);
        assert_eq!(polarity_from_score(0).unwrap(), PolarityLabel::Neutral);
        assert_eq!(polarity_from_score(-1).unwrap(), PolarityLabel::Negative);
        assert_eq!(polarity_from_score(-9).unwrap(), PolarityLabel::Negative);
        assert_eq!(polarity_from_score(99).unwrap(), PolarityLabel::Mixed);
        for bad in [10, -10, 42, 98, 100, i32::MIN, i32::MAX] {
            assert!(matches!(
                polarity_from_score(bad),
                Err(Error::ScoreOutOfRange(s)) if s == bad
            ));
        }
    }

    #[test]
    fn sign_consistency_over_full_domain() {
        for p in -9..=9 {
            let label = polarity_from_score(p).unwrap();
            assert_eq!(label == PolarityLabel::Positive, (1..=9).contains(&p));
            assert_eq!(label == PolarityLabel::Negative, (-9..=-1).contains(&p));
            assert_eq!(label == PolarityLabel::Neutral, p == 0);
        }
    }
}
