//! Annotated review corpora: parsing, validation, splitting, and the
//! descriptive statistics table.
//!
//! The on-disk format is one JSON record per line, one record per review.
//! Sentence segmentation happens out of band; records store pre-segmented
//! sentences, each carrying zero or more `(aspect, score)` annotations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::taxonomy::{polarity_from_score, PolarityLabel, Taxonomy};
use crate::{Error, Result};

/// One `(aspect, score)` tuple attached to a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub aspect: String,
    pub score: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<Annotation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

/// Validated corpus bound to the taxonomy it was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedCorpus {
    pub reviews: Vec<Review>,
    pub taxonomy: Arc<Taxonomy>,
}

/// Occurrence and polarity tallies for one label row.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub occurrences: u64,
    pub positive: u64,
    pub negative: u64,
    pub neutral: u64,
    pub mixed: u64,
}

impl LabelCounts {
    fn add_score(&mut self, score: i32) {
        self.occurrences += 1;
        match polarity_from_score(score).expect("validated corpus") {
            PolarityLabel::Positive => self.positive += 1,
            PolarityLabel::Negative => self.negative += 1,
            PolarityLabel::Neutral => self.neutral += 1,
            PolarityLabel::Mixed => self.mixed += 1,
        }
    }

    fn merge(&mut self, other: &LabelCounts) {
        self.occurrences += other.occurrences;
        self.positive += other.positive;
        self.negative += other.negative;
        self.neutral += other.neutral;
        self.mixed += other.mixed;
    }
}

/// Descriptive statistics of a corpus.
///
/// Category counts are occurrence sums over their member aspects.
/// Sentences without annotations are tallied under a synthetic
/// "Other" / "No Label" row rather than being dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub review_count: u64,
    pub sentence_count: u64,
    pub annotation_count: u64,
    pub unannotated_sentence_count: u64,
    pub per_aspect: BTreeMap<String, LabelCounts>,
    pub per_category: BTreeMap<String, LabelCounts>,
    /// Category order of the underlying taxonomy, for table rendering.
    pub category_order: Vec<(String, Vec<String>)>,
}

impl CorpusStats {
    pub fn sentences_per_review(&self) -> f64 {
        self.sentence_count as f64 / self.review_count as f64
    }

    pub fn annotations_per_sentence(&self) -> f64 {
        self.annotation_count as f64 / self.sentence_count as f64
    }
}

impl AnnotatedCorpus {
    /// Validates `reviews` against `taxonomy` and builds a corpus.
    pub fn new(reviews: Vec<Review>, taxonomy: Arc<Taxonomy>) -> Result<Self> {
        let mut seen_ids = BTreeSet::new();
        for (idx, review) in reviews.iter().enumerate() {
            validate_review(review, &taxonomy, idx + 1)?;
            if !seen_ids.insert(review.id.clone()) {
                return Err(Error::DuplicateReviewId(review.id.clone()));
            }
        }
        Ok(AnnotatedCorpus { reviews, taxonomy })
    }

    /// Parses a line-delimited corpus file, one review record per line.
    pub fn load(path: impl AsRef<Path>, taxonomy: Arc<Taxonomy>) -> Result<Self> {
        let path = path.as_ref();
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading corpus {}", path.display()), e))?;
        Self::parse(&raw, taxonomy)
    }

    /// Parses corpus records from an in-memory string.
    pub fn parse(raw: &str, taxonomy: Arc<Taxonomy>) -> Result<Self> {
        let mut reviews = Vec::new();
        for (idx, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let review: Review = serde_json::from_str(line).map_err(|e| Error::CorpusRecord {
                record: idx + 1,
                message: e.to_string(),
            })?;
            reviews.push(review);
        }
        AnnotatedCorpus::new(reviews, taxonomy)
    }

    /// Serializes back to the line-delimited format.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for review in &self.reviews {
            out.push_str(&serde_json::to_string(review).expect("serializable review"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_jsonl())
            .map_err(|e| Error::io(format!("writing corpus {}", path.display()), e))
    }

    pub fn sentence_count(&self) -> usize {
        self.reviews.iter().map(|r| r.sentences.len()).sum()
    }

    pub fn annotation_count(&self) -> usize {
        self.reviews
            .iter()
            .flat_map(|r| &r.sentences)
            .map(|s| s.annotations.len())
            .sum()
    }

    /// All sentences in review order.
    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.reviews.iter().flat_map(|r| r.sentences.iter())
    }
}

/// Record-positional validation: every rejection names the offending
/// record so bad lines can be found in large corpora.
fn validate_review(review: &Review, taxonomy: &Taxonomy, record: usize) -> Result<()> {
    let reject = |message: String| Err(Error::CorpusRecord { record, message });
    if review.sentences.is_empty() {
        return reject(format!("review {:?} has no sentences", review.id));
    }
    for sentence in &review.sentences {
        if sentence.text.trim().is_empty() {
            return reject(format!("review {:?} contains an empty sentence", review.id));
        }
        let mut seen_aspects = BTreeSet::new();
        for annotation in &sentence.annotations {
            if !taxonomy.contains_aspect(&annotation.aspect) {
                return reject(Error::UnknownAspect(annotation.aspect.clone()).to_string());
            }
            if let Err(e) = polarity_from_score(annotation.score) {
                return reject(e.to_string());
            }
            if !seen_aspects.insert(annotation.aspect.trim()) {
                return reject(format!(
                    "review {:?}: aspect {:?} annotated twice in one sentence",
                    review.id, annotation.aspect
                ));
            }
        }
    }
    Ok(())
}

/// Exact occurrence/polarity tallies for every aspect and category.
pub fn compute_stats(corpus: &AnnotatedCorpus) -> CorpusStats {
    let taxonomy = &corpus.taxonomy;
    let mut per_aspect: BTreeMap<String, LabelCounts> = taxonomy
        .aspect_names()
        .map(|a| (a.to_string(), LabelCounts::default()))
        .collect();

    let mut annotation_count = 0u64;
    let mut unannotated = 0u64;
    for sentence in corpus.sentences() {
        if sentence.annotations.is_empty() {
            unannotated += 1;
        }
        for annotation in &sentence.annotations {
            annotation_count += 1;
            per_aspect
                .get_mut(annotation.aspect.trim())
                .expect("validated corpus")
                .add_score(annotation.score);
        }
    }

    let mut per_category = BTreeMap::new();
    let mut category_order = Vec::new();
    for category in &taxonomy.categories {
        let mut counts = LabelCounts::default();
        for aspect in &category.aspects {
            counts.merge(&per_aspect[aspect]);
        }
        per_category.insert(category.name.clone(), counts);
        category_order.push((category.name.clone(), category.aspects.clone()));
    }

    CorpusStats {
        review_count: corpus.reviews.len() as u64,
        sentence_count: corpus.sentence_count() as u64,
        annotation_count,
        unannotated_sentence_count: unannotated,
        per_aspect,
        per_category,
        category_order,
    }
}

/// Splits at review granularity. `test_fraction` of the reviews (rounded,
/// clamped to `[1, n-1]`) form the test side; the partition is a pure
/// function of `seed`.
pub fn split_corpus(
    corpus: &AnnotatedCorpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(AnnotatedCorpus, AnnotatedCorpus)> {
    let n = corpus.reviews.len();
    if n < 2 {
        return Err(Error::TooFewReviews(n));
    }
    let test_count = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let test_set: BTreeSet<usize> = indices.into_iter().take(test_count).collect();

    let mut train = Vec::with_capacity(n - test_count);
    let mut test = Vec::with_capacity(test_count);
    for (idx, review) in corpus.reviews.iter().enumerate() {
        if test_set.contains(&idx) {
            test.push(review.clone());
        } else {
            train.push(review.clone());
        }
    }
    Ok((
        AnnotatedCorpus {
            reviews: train,
            taxonomy: corpus.taxonomy.clone(),
        },
        AnnotatedCorpus {
            reviews: test,
            taxonomy: corpus.taxonomy.clone(),
        },
    ))
}

/// Categories ranked by `positive / (positive + negative)`, descending.
///
/// Categories with no polar mentions rank last with an undefined ratio;
/// ties break by category name ascending.
pub fn polarity_ranking(stats: &CorpusStats) -> Vec<(String, Option<f64>)> {
    let mut rows: Vec<(String, Option<f64>)> = stats
        .per_category
        .iter()
        .map(|(name, counts)| {
            let polar = counts.positive + counts.negative;
            let ratio = if polar == 0 {
                None
            } else {
                Some(counts.positive as f64 / polar as f64)
            };
            (name.clone(), ratio)
        })
        .collect();
    rows.sort_by(|(name_a, ratio_a), (name_b, ratio_b)| match (ratio_a, ratio_b) {
        (Some(a), Some(b)) => b.partial_cmp(a).unwrap().then_with(|| name_a.cmp(name_b)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => name_a.cmp(name_b),
    });
    rows
}

/// Renders the tab-separated statistics table: one row per category
/// followed by its aspects, then the synthetic "Other" / "No Label" rows.
pub fn render_stats_table(stats: &CorpusStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# reviews\t{}", stats.review_count);
    let _ = writeln!(out, "# sentences\t{}", stats.sentence_count);
    let _ = writeln!(out, "# annotations\t{}", stats.annotation_count);
    let _ = writeln!(
        out,
        "# sentences_per_review\t{:.4}",
        stats.sentences_per_review()
    );
    let _ = writeln!(
        out,
        "# annotations_per_sentence\t{:.4}",
        stats.annotations_per_sentence()
    );
    let _ = writeln!(out, "Label\tOcc\tPos\tNeg\tNeutral\tMixed");
    let row = |out: &mut String, label: &str, c: &LabelCounts| {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            label, c.occurrences, c.positive, c.negative, c.neutral, c.mixed
        );
    };
    for (category, aspects) in &stats.category_order {
        row(&mut out, category, &stats.per_category[category]);
        for aspect in aspects {
            row(&mut out, aspect, &stats.per_aspect[aspect]);
        }
    }
    let other = LabelCounts {
        occurrences: stats.unannotated_sentence_count,
        ..LabelCounts::default()
    };
    row(&mut out, "Other", &other);
    row(&mut out, "No Label", &other);
    out
}

/// Renders the positive-ratio ranking section.
pub fn render_ranking(stats: &CorpusStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# category positive ratio = positive/(positive+negative)");
    let _ = writeln!(out, "Category\tPositiveRatio");
    for (category, ratio) in polarity_ranking(stats) {
        match ratio {
            Some(r) => {
                let _ = writeln!(out, "{category}\t{r:.4}");
            }
            None => {
                let _ = writeln!(out, "{category}\tundefined");
            }
        }
    }
    out
}
