//! Sparse feature extraction for sentences.
//!
//! Two feature profiles exist. The aspect profile carries tf·idf unigram
//! weights, bigram/trigram indicators, and cue-dictionary counts. The
//! polarity profile carries bigram indicators, polarity-word /
//! diminisher / intensifier counts, prior-score aggregates, and negation
//! cross-product indicators.
//!
//! Extraction is pure: identical (tokens, vocabulary, lexicons) always
//! produce the bit-identical vector, and nothing a sentence does can
//! change the frozen vocabulary.

mod lexicon;
mod tokenizer;
mod vocab;

pub use lexicon::{
    assign_slots, load_lexicon_dir, negation_triggers, Lexicon, LexiconKind,
    DEFAULT_NEGATION_TRIGGERS,
};
pub use tokenizer::tokenize;
pub use vocab::{ngram_key, TermEntry, TermKind, Vocabulary};

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// Feature family; keeps id namespaces disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureFamily {
    /// tf·idf-weighted unigrams (index = vocabulary id).
    TfIdf = 0,
    /// Bigram/trigram indicators (index = vocabulary id).
    Ngram = 1,
    /// Lexicon count and prior-sum features (index = slot * 3 + component).
    Lexicon = 2,
    /// Negation cross-product indicators (index = vocabulary id of the
    /// word following the trigger).
    Negation = 3,
    /// Category predictions propagated into aspect classifiers
    /// (index = category position in the taxonomy).
    CategoryIndicator = 4,
}

/// Interned feature identifier: family tag in the top byte, index below.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FeatureId(pub u64);

impl FeatureId {
    pub fn new(family: FeatureFamily, index: u64) -> Self {
        debug_assert!(index < 1 << 56);
        FeatureId(((family as u64) << 56) | index)
    }

    pub fn family(self) -> Option<FeatureFamily> {
        match self.0 >> 56 {
            0 => Some(FeatureFamily::TfIdf),
            1 => Some(FeatureFamily::Ngram),
            2 => Some(FeatureFamily::Lexicon),
            3 => Some(FeatureFamily::Negation),
            4 => Some(FeatureFamily::CategoryIndicator),
            _ => None,
        }
    }

    pub fn index(self) -> u64 {
        self.0 & ((1 << 56) - 1)
    }
}

/// Sparse feature vector. Zero-valued entries are never stored and all
/// stored values are finite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(BTreeMap<FeatureId, f64>);

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `id` to `value`; zero values erase the entry.
    pub fn set(&mut self, id: FeatureId, value: f64) {
        assert!(value.is_finite(), "non-finite feature value");
        if value == 0.0 {
            self.0.remove(&id);
        } else {
            self.0.insert(id, value);
        }
    }

    pub fn add(&mut self, id: FeatureId, delta: f64) {
        let value = self.get(id) + delta;
        self.set(id, value);
    }

    pub fn get(&self, id: FeatureId) -> f64 {
        self.0.get(&id).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, f64)> + '_ {
        self.0.iter().map(|(&id, &v)| (id, v))
    }

    /// Componentwise union; families are disjoint so no ids collide, but
    /// shared ids would accumulate.
    pub fn merge(&mut self, other: &FeatureVector) {
        for (id, value) in other.iter() {
            self.add(id, value);
        }
    }
}

impl FromIterator<(FeatureId, f64)> for FeatureVector {
    fn from_iter<T: IntoIterator<Item = (FeatureId, f64)>>(iter: T) -> Self {
        let mut fv = FeatureVector::new();
        for (id, value) in iter {
            fv.set(id, value);
        }
        fv
    }
}

/// Which feature families a classifier consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureProfile {
    /// Category/aspect detection: tf·idf + bigrams/trigrams + cue counts.
    Aspect,
    /// Polarity detection: bigrams + polarity lexicon features + negation.
    Polarity,
}

/// tf·idf weights for interned unigrams: `tf(t) * ln(N / df(t))`.
///
/// Terms occurring in every training sentence carry zero weight and are
/// omitted, as are out-of-vocabulary terms.
pub fn tfidf_features(tokens: &[String], vocab: &Vocabulary) -> FeatureVector {
    let mut tf: BTreeMap<u32, f64> = BTreeMap::new();
    for token in tokens {
        if let Some(id) = vocab.id_of(token) {
            if vocab.entry(id).kind == TermKind::Unigram {
                *tf.entry(id).or_insert(0.0) += 1.0;
            }
        }
    }
    let n = vocab.n_docs as f64;
    let mut fv = FeatureVector::new();
    for (id, tf) in tf {
        let df = vocab.entry(id).df as f64;
        let weight = tf * (n / df).ln();
        fv.set(FeatureId::new(FeatureFamily::TfIdf, id as u64), weight);
    }
    fv
}

fn ngram_indicators(tokens: &[String], vocab: &Vocabulary, include_trigrams: bool) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let mark = |key: String, expected: TermKind, fv: &mut FeatureVector| {
        if let Some(id) = vocab.id_of(&key) {
            if vocab.entry(id).kind == expected {
                fv.set(FeatureId::new(FeatureFamily::Ngram, id as u64), 1.0);
            }
        }
    };
    for pair in tokens.windows(2) {
        mark(ngram_key(pair), TermKind::Bigram, &mut fv);
    }
    if include_trigrams {
        for triple in tokens.windows(3) {
            mark(ngram_key(triple), TermKind::Trigram, &mut fv);
        }
    }
    fv
}

/// Occurrence indicators (value 1) for every interned bigram and trigram
/// in the token sequence.
pub fn ngram_features(tokens: &[String], vocab: &Vocabulary) -> FeatureVector {
    ngram_indicators(tokens, vocab, true)
}

const LEXICON_COMPONENTS: u64 = 3;

/// Sub-feature of a lexicon: counts use component 0; prior-scored
/// lexicons additionally use 1 (negative magnitude) and 2 (zero matches).
pub fn lexicon_feature_id(lexicon: &Lexicon, component: u64) -> FeatureId {
    FeatureId::new(
        FeatureFamily::Lexicon,
        lexicon.slot as u64 * LEXICON_COMPONENTS + component,
    )
}

/// Count and prior-aggregate features over the given lexicons.
///
/// Cue, polarity-word, diminisher, and intensifier lexicons each yield
/// one matched-token count. A prior-scored lexicon yields the sum of
/// positive priors, the sum of negative prior magnitudes, and the count
/// of zero-prior matches. NegationTrigger lexicons yield nothing here.
pub fn lexicon_features(tokens: &[String], lexicons: &[Lexicon]) -> FeatureVector {
    lexicon_features_of(tokens, lexicons.iter())
}

fn lexicon_features_of<'a>(
    tokens: &[String],
    lexicons: impl Iterator<Item = &'a Lexicon>,
) -> FeatureVector {
    let mut fv = FeatureVector::new();
    for lexicon in lexicons {
        match lexicon.kind {
            LexiconKind::AspectCue
            | LexiconKind::CategoryCue
            | LexiconKind::PolarityWord
            | LexiconKind::Diminisher
            | LexiconKind::Intensifier => {
                let count = tokens.iter().filter(|t| lexicon.contains(t)).count();
                if count > 0 {
                    fv.set(lexicon_feature_id(lexicon, 0), count as f64);
                }
            }
            LexiconKind::PriorScored => {
                let mut positive_sum = 0.0;
                let mut negative_magnitude = 0.0;
                let mut zero_matches = 0u64;
                for token in tokens {
                    if let Some(prior) = lexicon.entries.get(token.as_str()) {
                        let prior = prior.expect("PriorScored entries carry a prior");
                        if prior > 0.0 {
                            positive_sum += prior;
                        } else if prior < 0.0 {
                            negative_magnitude += -prior;
                        } else {
                            zero_matches += 1;
                        }
                    }
                }
                fv.set(lexicon_feature_id(lexicon, 0), positive_sum);
                fv.set(lexicon_feature_id(lexicon, 1), negative_magnitude);
                fv.set(lexicon_feature_id(lexicon, 2), zero_matches as f64);
            }
            LexiconKind::NegationTrigger => {}
        }
    }
    fv
}

/// Cross-product indicators for the first negation trigger: one binary
/// feature per interned word strictly after it. No trigger, or a trigger
/// in final position, yields nothing; later triggers are ignored.
pub fn negation_features(
    tokens: &[String],
    triggers: &BTreeSet<String>,
    vocab: &Vocabulary,
) -> FeatureVector {
    let mut fv = FeatureVector::new();
    let Some(first) = tokens.iter().position(|t| triggers.contains(t)) else {
        return fv;
    };
    for token in &tokens[first + 1..] {
        if let Some(id) = vocab.id_of(token) {
            if vocab.entry(id).kind == TermKind::Unigram {
                fv.set(FeatureId::new(FeatureFamily::Negation, id as u64), 1.0);
            }
        }
    }
    fv
}

fn is_aspect_cue_kind(kind: LexiconKind) -> bool {
    matches!(
        kind,
        LexiconKind::AspectCue | LexiconKind::CategoryCue | LexiconKind::PolarityWord
    )
}

fn is_polarity_kind(kind: LexiconKind) -> bool {
    matches!(
        kind,
        LexiconKind::PolarityWord
            | LexiconKind::Diminisher
            | LexiconKind::Intensifier
            | LexiconKind::PriorScored
    )
}

/// Builds the full feature vector for one profile as the union of its
/// family vectors. Family namespaces are disjoint, so the union is
/// collision-free.
pub fn assemble(
    tokens: &[String],
    vocab: &Vocabulary,
    lexicons: &[Lexicon],
    profile: FeatureProfile,
) -> FeatureVector {
    let mut fv = FeatureVector::new();
    match profile {
        FeatureProfile::Aspect => {
            fv.merge(&tfidf_features(tokens, vocab));
            fv.merge(&ngram_indicators(tokens, vocab, true));
            fv.merge(&lexicon_features_of(
                tokens,
                lexicons.iter().filter(|l| is_aspect_cue_kind(l.kind)),
            ));
        }
        FeatureProfile::Polarity => {
            fv.merge(&ngram_indicators(tokens, vocab, false));
            fv.merge(&lexicon_features_of(
                tokens,
                lexicons.iter().filter(|l| is_polarity_kind(l.kind)),
            ));
            let triggers = negation_triggers(lexicons);
            fv.merge(&negation_features(tokens, &triggers, vocab));
        }
    }
    fv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<String> {
        text.split_whitespace().map(str::to_string).collect()
    }

    fn fit(texts: &[&str]) -> Vocabulary {
        Vocabulary::fit(&texts.iter().map(|t| toks(t)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn tfidf_matches_hand_computation() {
        // 4 sentences, "x" in one sentence twice -> tf=2, df=1
        let vocab = fit(&["x x", "a b", "b c", "c a"]);
        let fv = tfidf_features(&toks("x x"), &vocab);
        let id = FeatureId::new(FeatureFamily::TfIdf, vocab.id_of("x").unwrap() as u64);
        let expected = 2.0 * 4.0_f64.ln();
        assert!((fv.get(id) - expected).abs() < 1e-12);
        assert!((expected - 2.7726).abs() < 1e-4);
    }

    #[test]
    fn tfidf_omits_ubiquitous_and_unknown_terms() {
        let vocab = fit(&["k a", "k b", "k c", "k d"]);
        let fv = tfidf_features(&toks("k zzz"), &vocab);
        assert!(fv.is_empty()); // df==N weight 0, OOV dropped
    }

    #[test]
    fn tfidf_monotone_in_df() {
        let vocab = fit(&["rare a", "mid a", "mid b", "common c", "common d", "common e"]);
        let weight = |term: &str| {
            let fv = tfidf_features(&toks(term), &vocab);
            let id = FeatureId::new(FeatureFamily::TfIdf, vocab.id_of(term).unwrap() as u64);
            fv.get(id)
        };
        assert!(weight("rare") > weight("mid"));
        assert!(weight("mid") > weight("common"));
    }

    #[test]
    fn ngram_features_enumerate_adjacent_sequences() {
        let vocab = fit(&["a b c"]);
        let fv = ngram_features(&toks("a b c"), &vocab);
        let ngram = |key: &str| {
            FeatureId::new(FeatureFamily::Ngram, vocab.id_of(key).unwrap() as u64)
        };
        assert_eq!(fv.get(ngram("a b")), 1.0);
        assert_eq!(fv.get(ngram("b c")), 1.0);
        assert_eq!(fv.get(ngram("a b c")), 1.0);
        assert_eq!(fv.len(), 3);
    }

    #[test]
    fn single_token_has_no_ngrams() {
        let vocab = fit(&["a b"]);
        assert!(ngram_features(&toks("a"), &vocab).is_empty());
    }

    #[test]
    fn repeated_ngrams_stay_indicators() {
        let vocab = fit(&["a a a a"]);
        let fv = ngram_features(&toks("a a a a"), &vocab);
        let bigram = FeatureId::new(FeatureFamily::Ngram, vocab.id_of("a a").unwrap() as u64);
        let trigram = FeatureId::new(FeatureFamily::Ngram, vocab.id_of("a a a").unwrap() as u64);
        assert_eq!(fv.get(bigram), 1.0);
        assert_eq!(fv.get(trigram), 1.0);
    }

    #[test]
    fn lexicon_counts_matched_tokens() {
        let mut lexicons = vec![Lexicon::new(
            "pol",
            LexiconKind::PolarityWord,
            &[("gut", None), ("schlecht", None)],
        )
        .unwrap()];
        assign_slots(&mut lexicons);
        let fv = lexicon_features(&toks("gut und gut"), &lexicons);
        assert_eq!(fv.get(lexicon_feature_id(&lexicons[0], 0)), 2.0);
        assert!(lexicon_features(&toks("nichts hier"), &lexicons).is_empty());
    }

    #[test]
    fn prior_scored_sums_split_by_sign() {
        let mut lexicons = vec![Lexicon::new(
            "priors",
            LexiconKind::PriorScored,
            &[("gut", Some(1.0)), ("schlecht", Some(-1.0)), ("ok", Some(0.0))],
        )
        .unwrap()];
        assign_slots(&mut lexicons);
        let fv = lexicon_features(&toks("gut gut schlecht ok"), &lexicons);
        assert_eq!(fv.get(lexicon_feature_id(&lexicons[0], 0)), 2.0);
        assert_eq!(fv.get(lexicon_feature_id(&lexicons[0], 1)), 1.0);
        assert_eq!(fv.get(lexicon_feature_id(&lexicons[0], 2)), 1.0);
    }

    #[test]
    fn negation_crosses_first_trigger_with_succeeding_words() {
        let vocab = fit(&["nicht gut genug"]);
        let triggers: BTreeSet<String> = ["nicht".to_string()].into();
        let fv = negation_features(&toks("nicht gut genug"), &triggers, &vocab);
        let neg = |term: &str| {
            FeatureId::new(FeatureFamily::Negation, vocab.id_of(term).unwrap() as u64)
        };
        assert_eq!(fv.get(neg("gut")), 1.0);
        assert_eq!(fv.get(neg("genug")), 1.0);
        assert_eq!(fv.len(), 2);
    }

    #[test]
    fn negation_without_trigger_or_with_terminal_trigger_is_empty() {
        let vocab = fit(&["gut nicht"]);
        let triggers: BTreeSet<String> = ["nicht".to_string()].into();
        assert!(negation_features(&toks("alles gut"), &triggers, &vocab).is_empty());
        assert!(negation_features(&toks("gut nicht"), &triggers, &vocab).is_empty());
    }

    #[test]
    fn only_first_trigger_generates_features() {
        let vocab = fit(&["nicht gut kein glück"]);
        let triggers: BTreeSet<String> = ["nicht".into(), "kein".into()].into();
        let fv = negation_features(&toks("nicht gut kein glück"), &triggers, &vocab);
        // everything after "nicht", including the second trigger itself
        assert_eq!(fv.len(), 3);
    }

    #[test]
    fn aspect_profile_has_no_negation_features() {
        let vocab = fit(&["nicht gut"]);
        let fv = assemble(&toks("nicht gut"), &vocab, &[], FeatureProfile::Aspect);
        assert!(fv
            .iter()
            .all(|(id, _)| id.family() != Some(FeatureFamily::Negation)));
    }

    #[test]
    fn polarity_profile_without_matches_is_empty() {
        let vocab = fit(&["a b c"]);
        // no interned bigrams, no lexicon matches, no triggers in sentence
        let fv = assemble(&toks("x y"), &vocab, &[], FeatureProfile::Polarity);
        assert!(fv.is_empty());
    }

    #[test]
    fn polarity_profile_excludes_trigrams() {
        let vocab = fit(&["a b c"]);
        let fv = assemble(&toks("a b c"), &vocab, &[], FeatureProfile::Polarity);
        let trigram = FeatureId::new(FeatureFamily::Ngram, vocab.id_of("a b c").unwrap() as u64);
        assert_eq!(fv.get(trigram), 0.0);
        assert_eq!(fv.len(), 2); // the two bigrams
    }

    #[test]
    fn assemble_equals_union_of_family_vectors() {
        let vocab = fit(&["nicht gut genug", "gut gut"]);
        let mut lexicons = vec![
            Lexicon::new("cues", LexiconKind::AspectCue, &[("gut", None)]).unwrap(),
            Lexicon::new("pri", LexiconKind::PriorScored, &[("gut", Some(0.5))]).unwrap(),
        ];
        assign_slots(&mut lexicons);
        let tokens = toks("nicht gut genug");

        let assembled = assemble(&tokens, &vocab, &lexicons, FeatureProfile::Aspect);
        let mut manual = FeatureVector::new();
        manual.merge(&tfidf_features(&tokens, &vocab));
        manual.merge(&ngram_features(&tokens, &vocab));
        manual.merge(&lexicon_features(&tokens, &lexicons[..1]));
        assert_eq!(assembled, manual);
    }

    #[test]
    fn extraction_is_deterministic_and_freezes_vocabulary() {
        let vocab = fit(&["nicht gut genug", "zu viel stoff"]);
        let size_before = vocab.len();
        let mut lexicons =
            vec![Lexicon::new("pri", LexiconKind::PriorScored, &[("gut", Some(1.0))]).unwrap()];
        assign_slots(&mut lexicons);
        let tokens = tokenize("Nicht gut genug, völlig neu!");
        let a = assemble(&tokens, &vocab, &lexicons, FeatureProfile::Polarity);
        let b = assemble(&tokens, &vocab, &lexicons, FeatureProfile::Polarity);
        assert_eq!(a, b);
        assert_eq!(vocab.len(), size_before);
    }

    #[test]
    fn families_do_not_collide() {
        for (family, other) in [
            (FeatureFamily::TfIdf, FeatureFamily::Ngram),
            (FeatureFamily::Lexicon, FeatureFamily::Negation),
            (FeatureFamily::Ngram, FeatureFamily::CategoryIndicator),
        ] {
            assert_ne!(FeatureId::new(family, 7), FeatureId::new(other, 7));
        }
        let id = FeatureId::new(FeatureFamily::Negation, 42);
        assert_eq!(id.family(), Some(FeatureFamily::Negation));
        assert_eq!(id.index(), 42);
    }

    #[test]
    fn zero_values_are_not_stored() {
        let mut fv = FeatureVector::new();
        fv.set(FeatureId::new(FeatureFamily::TfIdf, 1), 0.0);
        assert!(fv.is_empty());
        fv.add(FeatureId::new(FeatureFamily::TfIdf, 1), 2.0);
        fv.add(FeatureId::new(FeatureFamily::TfIdf, 1), -2.0);
        assert!(fv.is_empty());
    }
}
