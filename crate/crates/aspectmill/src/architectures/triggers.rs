//! Mutual-information selection of per-aspect trigger terms.
//!
//! For each aspect, unigrams are ranked by the mutual information between
//! term presence and aspect presence over training sentences, computed on
//! an add-one-smoothed 2x2 contingency table.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::architectures::build_targets;
use crate::corpus::AnnotatedCorpus;
use crate::features::tokenize;

/// Mutual information (in nats) of a 2x2 contingency table after adding
/// one to every cell. `n11` counts sentences containing both the term and
/// the aspect; `n00` neither.
pub fn mutual_information(n11: u64, n10: u64, n01: u64, n00: u64) -> f64 {
    let c11 = (n11 + 1) as f64;
    let c10 = (n10 + 1) as f64;
    let c01 = (n01 + 1) as f64;
    let c00 = (n00 + 1) as f64;
    let n = c11 + c10 + c01 + c00;
    let row1 = c11 + c10;
    let row0 = c01 + c00;
    let col1 = c11 + c01;
    let col0 = c10 + c00;
    let term = |c: f64, row: f64, col: f64| (c / n) * ((n * c) / (row * col)).ln();
    term(c11, row1, col1) + term(c10, row1, col0) + term(c01, row0, col1) + term(c00, row0, col0)
}

/// Ranks, per aspect, the `k` unigrams with the highest mutual
/// information to the aspect label. Ties break lexicographically; `k`
/// larger than the vocabulary returns every term.
pub fn select_trigger_terms(
    corpus: &AnnotatedCorpus,
    k: usize,
) -> BTreeMap<String, Vec<String>> {
    let gold = build_targets(corpus);
    let sentence_terms: Vec<BTreeSet<String>> = corpus
        .sentences()
        .map(|s| tokenize(&s.text).into_iter().collect())
        .collect();
    let n = sentence_terms.len() as u64;

    // per-term sentence counts, overall and jointly with each aspect
    let mut term_count: BTreeMap<&str, u64> = BTreeMap::new();
    let mut joint_count: HashMap<(&str, &str), u64> = HashMap::new();
    for (terms, gold) in sentence_terms.iter().zip(&gold) {
        for term in terms {
            *term_count.entry(term).or_insert(0) += 1;
            for aspect in &gold.aspects {
                *joint_count.entry((term, aspect)).or_insert(0) += 1;
            }
        }
    }
    let mut aspect_count: BTreeMap<&str, u64> = BTreeMap::new();
    for g in &gold {
        for aspect in &g.aspects {
            *aspect_count.entry(aspect).or_insert(0) += 1;
        }
    }

    let mut result = BTreeMap::new();
    for aspect in corpus.taxonomy.aspect_names() {
        let n_aspect = aspect_count.get(aspect).copied().unwrap_or(0);
        let mut scored: Vec<(f64, &str)> = term_count
            .iter()
            .map(|(&term, &n_term)| {
                let n11 = joint_count.get(&(term, aspect)).copied().unwrap_or(0);
                let n10 = n_term - n11;
                let n01 = n_aspect - n11;
                let n00 = n - n11 - n10 - n01;
                (mutual_information(n11, n10, n01, n00), term)
            })
            .collect();
        scored.sort_by(|(mi_a, term_a), (mi_b, term_b)| {
            mi_b.partial_cmp(mi_a).unwrap().then_with(|| term_a.cmp(term_b))
        });
        result.insert(
            aspect.to_string(),
            scored.into_iter().take(k).map(|(_, t)| t.to_string()).collect(),
        );
    }
    result
}
