//! Interning table for unigrams, bigrams, and trigrams with per-term
//! document frequencies (document = sentence).
//!
//! The vocabulary is frozen after fitting: feature extraction never adds
//! terms, and out-of-vocabulary terms at predict time map to no feature.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// N-gram arity of an interned term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Unigram,
    Bigram,
    Trigram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub term: String,
    pub kind: TermKind,
    /// Number of training sentences containing the term.
    pub df: u32,
}

/// Frozen term table fitted on the training sentences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    /// Number of training sentences.
    pub n_docs: u32,
    entries: Vec<TermEntry>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

/// Joins n-gram tokens into a single interned key. Tokens never contain
/// whitespace, so a space join cannot collide across arities.
pub fn ngram_key(tokens: &[String]) -> String {
    tokens.join(" ")
}

impl Vocabulary {
    /// Fits the table: interns every unigram, bigram, and trigram seen in
    /// `sentences` (first-seen order) and counts document frequencies.
    pub fn fit(sentences: &[Vec<String>]) -> Result<Self> {
        if sentences.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let mut vocab = Vocabulary {
            n_docs: sentences.len() as u32,
            entries: Vec::new(),
            index: HashMap::new(),
        };
        let mut seen_in_doc: Vec<u32> = Vec::new();
        for tokens in sentences {
            seen_in_doc.clear();
            let mut observe = |term: String, kind: TermKind, vocab: &mut Vocabulary| {
                let id = match vocab.index.get(&term) {
                    Some(&id) => id,
                    None => {
                        let id = vocab.entries.len() as u32;
                        vocab.entries.push(TermEntry { term: term.clone(), kind, df: 0 });
                        vocab.index.insert(term, id);
                        id
                    }
                };
                // df counts each sentence once
                if !seen_in_doc.contains(&id) {
                    seen_in_doc.push(id);
                    vocab.entries[id as usize].df += 1;
                }
            };
            for token in tokens {
                observe(token.clone(), TermKind::Unigram, &mut vocab);
            }
            for pair in tokens.windows(2) {
                observe(ngram_key(pair), TermKind::Bigram, &mut vocab);
            }
            for triple in tokens.windows(3) {
                observe(ngram_key(triple), TermKind::Trigram, &mut vocab);
            }
        }
        Ok(vocab)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn entry(&self, id: u32) -> &TermEntry {
        &self.entries[id as usize]
    }

    pub fn entries(&self) -> &[TermEntry] {
        &self.entries
    }

    /// Unigram terms with their document frequencies.
    pub fn unigrams(&self) -> impl Iterator<Item = (&str, u32)> {
        self.entries
            .iter()
            .filter(|e| e.kind == TermKind::Unigram)
            .map(|e| (e.term.as_str(), e.df))
    }

    /// Rebuilds the lookup index after deserialization.
    pub(crate) fn reindex(&mut self) {
        self.index = self
            .entries
            .iter()
            .enumerate()
            .map(|(id, e)| (e.term.clone(), id as u32))
            .collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentences(texts: &[&str]) -> Vec<Vec<String>> {
        texts
            .iter()
            .map(|t| t.split_whitespace().map(str::to_string).collect())
            .collect()
    }

    #[test]
    fn df_counts_sentences_not_occurrences() {
        let vocab = Vocabulary::fit(&sentences(&["x x x", "x y", "y z", "z w"])).unwrap();
        assert_eq!(vocab.n_docs, 4);
        let df = |t: &str| vocab.entry(vocab.id_of(t).unwrap()).df;
        assert_eq!(df("x"), 2);
        assert_eq!(df("y"), 2);
    }

    #[test]
    fn hand_counted_example() {
        let vocab = Vocabulary::fit(&sentences(&["a b", "b c", "c d", "d a"])).unwrap();
        for t in ["a", "b", "c", "d"] {
            assert_eq!(vocab.entry(vocab.id_of(t).unwrap()).df, 2, "df({t})");
        }
        // bigrams are interned too
        assert!(vocab.id_of("a b").is_some());
        assert_eq!(vocab.entry(vocab.id_of("a b").unwrap()).kind, TermKind::Bigram);
    }

    #[test]
    fn term_present_everywhere_has_df_equal_n() {
        let vocab = Vocabulary::fit(&sentences(&["k a", "k b", "k c", "k d"])).unwrap();
        assert_eq!(vocab.entry(vocab.id_of("k").unwrap()).df, 4);
    }

    #[test]
    fn absent_terms_are_not_interned() {
        let vocab = Vocabulary::fit(&sentences(&["a b"])).unwrap();
        assert!(vocab.id_of("zzz").is_none());
    }

    #[test]
    fn empty_training_set_is_an_error() {
        assert!(matches!(Vocabulary::fit(&[]), Err(Error::EmptyTrainingSet)));
    }

    #[test]
    fn ids_are_dense() {
        let vocab = Vocabulary::fit(&sentences(&["a b c", "c b a"])).unwrap();
        let mut ids: Vec<u32> = (0..vocab.len() as u32)
            .map(|id| vocab.id_of(&vocab.entry(id).term).unwrap())
            .collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..vocab.len() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn serde_round_trip_preserves_lookup() {
        let vocab = Vocabulary::fit(&sentences(&["a b c"])).unwrap();
        let json = serde_json::to_string(&vocab).unwrap();
        let mut back: Vocabulary = serde_json::from_str(&json).unwrap();
        back.reindex();
        assert_eq!(back.id_of("a b"), vocab.id_of("a b"));
        assert_eq!(back, vocab);
    }
}
