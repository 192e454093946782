//! Deterministic corpus builders used by tests, demos, and the shipped
//! fixture files.

use std::sync::Arc;

use crate::corpus::{AnnotatedCorpus, Annotation, Review, Sentence};
use crate::taxonomy::Taxonomy;

/// Curated aspect distribution for the bundled default taxonomy:
/// `(aspect, occurrences, positive, negative)`, remainder neutral.
/// [`reference_corpus`] reproduces exactly these tallies.
pub const REFERENCE_ASPECT_ROWS: [(&str, u64, u64, u64); 32] = [
    ("Average Demand", 60, 23, 25),
    ("Up-To-Date", 58, 35, 20),
    ("Practical Relevance", 50, 36, 8),
    ("Quality of Contents", 229, 143, 66),
    ("Exams", 77, 35, 19),
    ("Production Quality", 7, 5, 2),
    ("Accessibility", 22, 20, 2),
    ("Extent of Materials", 28, 21, 3),
    ("Exercise Materials", 44, 29, 13),
    ("Supervision", 487, 409, 61),
    ("Revision Time", 89, 78, 10),
    ("Organization", 173, 107, 54),
    ("Teaching Competence", 124, 101, 13),
    ("Didactics of Materials", 308, 220, 72),
    ("Justified Grading", 20, 15, 3),
    ("Revision Quality", 75, 48, 22),
    ("Usefulness", 119, 84, 28),
    ("Activity", 35, 29, 6),
    ("User-Friendliness", 20, 8, 11),
    ("Features", 22, 18, 2),
    ("Basic Tuition", 78, 48, 17),
    ("Additional Charges", 10, 7, 3),
    ("Scholarships", 2, 0, 0),
    ("Seminar Contents", 84, 59, 14),
    ("Management", 18, 12, 5),
    ("Locations", 9, 7, 2),
    ("Communications", 16, 15, 1),
    ("Flexibility", 103, 96, 2),
    ("Recommendation", 77, 71, 4),
    ("Personal Benefit", 74, 61, 6),
    ("Overall Satisfaction", 236, 215, 17),
    ("Learning Effort", 82, 29, 45),
];

/// Shape of the reference corpus.
pub const REFERENCE_REVIEWS: usize = 394;
pub const REFERENCE_SENTENCES: usize = 2481;
pub const REFERENCE_UNANNOTATED_SENTENCES: usize = 345;

/// Total annotations implied by [`REFERENCE_ASPECT_ROWS`].
pub fn reference_annotation_count() -> u64 {
    REFERENCE_ASPECT_ROWS.iter().map(|(_, occ, _, _)| occ).sum()
}

fn slug(aspect: &str) -> String {
    aspect.to_lowercase().replace([' ', '-'], "_")
}

fn polarity_word(score: i32) -> &'static str {
    if score > 0 {
        "gut"
    } else if score < 0 {
        "schlecht"
    } else {
        "okay"
    }
}

/// Builds the shipped reference corpus: 394 reviews, 2481 sentences (345
/// of them unannotated), with per-aspect occurrence/positive/negative
/// tallies exactly equal to [`REFERENCE_ASPECT_ROWS`].
///
/// Construction is deterministic. Annotations are laid out in taxonomy
/// order (positive, then negative, then neutral per aspect) and dealt
/// round-robin onto the annotated sentences; the round-robin stride
/// exceeds every per-aspect block, so no sentence sees an aspect twice.
pub fn reference_corpus() -> AnnotatedCorpus {
    let taxonomy = Arc::new(Taxonomy::bundled_default());
    let annotated_sentences = REFERENCE_SENTENCES - REFERENCE_UNANNOTATED_SENTENCES;

    let mut annotations = Vec::new();
    for (aspect, occurrences, positive, negative) in REFERENCE_ASPECT_ROWS {
        let neutral = occurrences - positive - negative;
        for _ in 0..positive {
            annotations.push(Annotation { aspect: aspect.to_string(), score: 5 });
        }
        for _ in 0..negative {
            annotations.push(Annotation { aspect: aspect.to_string(), score: -5 });
        }
        for _ in 0..neutral {
            annotations.push(Annotation { aspect: aspect.to_string(), score: 0 });
        }
    }

    let mut sentence_annotations: Vec<Vec<Annotation>> = vec![Vec::new(); annotated_sentences];
    for (idx, annotation) in annotations.into_iter().enumerate() {
        sentence_annotations[idx % annotated_sentences].push(annotation);
    }

    let mut sentences: Vec<Sentence> = sentence_annotations
        .into_iter()
        .map(|annotations| {
            let text = annotations
                .iter()
                .map(|a| format!("{} ist {}", slug(&a.aspect), polarity_word(a.score)))
                .collect::<Vec<_>>()
                .join(" und ");
            Sentence { text, annotations }
        })
        .collect();
    sentences.extend((0..REFERENCE_UNANNOTATED_SENTENCES).map(|_| Sentence {
        text: "nichts weiter zu berichten".to_string(),
        annotations: Vec::new(),
    }));

    // 2481 = 117 * 7 + 277 * 6
    let mut reviews = Vec::with_capacity(REFERENCE_REVIEWS);
    let mut cursor = 0;
    for review_idx in 0..REFERENCE_REVIEWS {
        let len = if review_idx < 117 { 7 } else { 6 };
        reviews.push(Review {
            id: format!("r{:03}", review_idx + 1),
            sentences: sentences[cursor..cursor + len].to_vec(),
        });
        cursor += len;
    }
    debug_assert_eq!(cursor, sentences.len());

    AnnotatedCorpus::new(reviews, taxonomy).expect("reference corpus is valid")
}

/// Builds a linearly separable corpus: each aspect owns a unique cue
/// token, sentences cycle through positive/negative/neutral wording, and
/// two sentences form a review.
///
/// Every detector the engine trains has a clean signal here: the cue
/// unigram for aspects and categories, and the `war gut` / `war schlecht`
/// / `war okay` bigram for polarity.
pub fn separable_corpus(taxonomy: Arc<Taxonomy>, sentences_per_aspect: usize) -> AnnotatedCorpus {
    assert!(sentences_per_aspect >= 1);
    let mut sentences = Vec::new();
    for aspect in taxonomy.aspect_names() {
        let cue = format!("cue_{}", slug(aspect));
        for i in 0..sentences_per_aspect {
            let score = match i % 3 {
                0 => 4,
                1 => -4,
                _ => 0,
            };
            let text = format!("das {cue} war {} heute", polarity_word(score));
            sentences.push(Sentence {
                text,
                annotations: vec![Annotation { aspect: aspect.to_string(), score }],
            });
        }
    }
    let reviews = sentences
        .chunks(2)
        .enumerate()
        .map(|(idx, chunk)| Review {
            id: format!("s{idx:04}"),
            sentences: chunk.to_vec(),
        })
        .collect();
    AnnotatedCorpus::new(reviews, taxonomy).expect("separable corpus is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::compute_stats;

    #[test]
    fn reference_corpus_matches_the_advertised_shape() {
        let corpus = reference_corpus();
        let stats = compute_stats(&corpus);
        assert_eq!(stats.review_count as usize, REFERENCE_REVIEWS);
        assert_eq!(stats.sentence_count as usize, REFERENCE_SENTENCES);
        assert_eq!(
            stats.unannotated_sentence_count as usize,
            REFERENCE_UNANNOTATED_SENTENCES
        );
        assert_eq!(stats.annotation_count, reference_annotation_count());
        for (aspect, occ, pos, neg) in REFERENCE_ASPECT_ROWS {
            let counts = &stats.per_aspect[aspect];
            assert_eq!(
                (counts.occurrences, counts.positive, counts.negative),
                (occ, pos, neg),
                "{aspect}"
            );
            assert_eq!(counts.neutral, occ - pos - neg, "{aspect} neutral remainder");
            assert_eq!(counts.mixed, 0);
        }
    }

    #[test]
    fn reference_corpus_is_deterministic() {
        assert_eq!(reference_corpus().to_jsonl(), reference_corpus().to_jsonl());
    }

    #[test]
    fn reference_ranking_leads_with_personal() {
        let stats = compute_stats(&reference_corpus());
        let ranking = crate::corpus::polarity_ranking(&stats);
        assert_eq!(ranking[0].0, "Personal");
        assert!((ranking[0].1.unwrap() - 472.0 / (472.0 + 74.0)).abs() < 1e-12);
        assert!((ranking[0].1.unwrap() - 0.8645).abs() < 1e-4);
        let study_contents = ranking.iter().find(|(c, _)| c == "Study Contents").unwrap();
        assert!((study_contents.1.unwrap() - 272.0 / (272.0 + 138.0)).abs() < 1e-12);
        assert!((study_contents.1.unwrap() - 0.6634).abs() < 1e-4);
        assert_eq!(ranking.last().unwrap().0, "Study Contents");
    }

    #[test]
    fn separable_corpus_annotates_every_aspect() {
        let corpus = separable_corpus(Arc::new(Taxonomy::bundled_default()), 6);
        let stats = compute_stats(&corpus);
        assert_eq!(stats.sentence_count, 32 * 6);
        for counts in stats.per_aspect.values() {
            assert_eq!(counts.occurrences, 6);
            assert_eq!(counts.positive, 2);
            assert_eq!(counts.negative, 2);
            assert_eq!(counts.neutral, 2);
        }
    }
}
