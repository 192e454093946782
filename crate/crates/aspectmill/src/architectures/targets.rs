//! Gold training targets derived from annotations.

use std::collections::BTreeSet;

use crate::corpus::AnnotatedCorpus;

/// Per-sentence gold labels shared by training and evaluation.
///
/// An aspect is true iff the sentence carries an annotation for it, a
/// category is true iff any member aspect is, and a sentence is polar iff
/// any annotation has a non-zero score. A mixed annotation (score 99)
/// counts as both a positive and a negative signal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SentenceGold {
    pub aspects: BTreeSet<String>,
    pub categories: BTreeSet<String>,
    pub polar: bool,
    pub positive: bool,
    pub negative: bool,
}

/// Gold labels for every sentence, in corpus order.
pub fn build_targets(corpus: &AnnotatedCorpus) -> Vec<SentenceGold> {
    let taxonomy = &corpus.taxonomy;
    corpus
        .sentences()
        .map(|sentence| {
            let mut gold = SentenceGold::default();
            for annotation in &sentence.annotations {
                let aspect = annotation.aspect.trim();
                gold.aspects.insert(aspect.to_string());
                gold.categories.insert(
                    taxonomy
                        .category_of(aspect)
                        .expect("validated corpus")
                        .to_string(),
                );
                match annotation.score {
                    99 => {
                        gold.polar = true;
                        gold.positive = true;
                        gold.negative = true;
                    }
                    0 => {}
                    s if s > 0 => {
                        gold.polar = true;
                        gold.positive = true;
                    }
                    _ => {
                        gold.polar = true;
                        gold.negative = true;
                    }
                }
            }
            gold
        })
        .collect()
}
