//! Training routines for the four classifier arrangements.
//!
//! Labels train independently, in parallel, each with a seed derived from
//! the run seed and the label name, so results do not depend on
//! scheduling. Category detectors are trained identically by every
//! arrangement.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::architectures::{
    build_targets, lexicon_digests, select_trigger_terms, Architecture, ModelBundle,
    PolarityModels, SentenceGold, WindowSize,
};
use crate::corpus::AnnotatedCorpus;
use crate::features::{assemble, tokenize, FeatureProfile, FeatureVector, Lexicon, Vocabulary};
use crate::learner::{train_binary, training_accuracy, LinearModel, TrainConfig};
use crate::Result;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Per-label seed so parallel training stays schedule-independent.
fn label_seed(base: u64, label: &str) -> u64 {
    base ^ fnv1a64(label.as_bytes())
}

struct ExtractedCorpus {
    aspect_features: Vec<FeatureVector>,
    polarity_features: Vec<FeatureVector>,
    gold: Vec<SentenceGold>,
}

fn extract_corpus(
    corpus: &AnnotatedCorpus,
    vocab: &Vocabulary,
    lexicons: &[Lexicon],
) -> ExtractedCorpus {
    let tokens: Vec<Vec<String>> = corpus.sentences().map(|s| tokenize(&s.text)).collect();
    let aspect_features = tokens
        .iter()
        .map(|t| assemble(t, vocab, lexicons, FeatureProfile::Aspect))
        .collect();
    let polarity_features = tokens
        .iter()
        .map(|t| assemble(t, vocab, lexicons, FeatureProfile::Polarity))
        .collect();
    ExtractedCorpus {
        aspect_features,
        polarity_features,
        gold: build_targets(corpus),
    }
}

/// Trains one model per label over (features[i], labels(label, i)) pairs.
/// An empty training set falls back to a constant-false model.
fn train_label_models<'a>(
    labels: Vec<String>,
    config: &TrainConfig,
    examples_for: impl Fn(&str) -> Vec<(&'a FeatureVector, bool)> + Sync,
) -> Result<BTreeMap<String, LinearModel>> {
    labels
        .into_par_iter()
        .map(|label| {
            let examples = examples_for(&label);
            let label_config = TrainConfig {
                seed: label_seed(config.seed, &label),
                ..config.clone()
            };
            let model = if examples.is_empty() {
                LinearModel::constant_false(&label_config)
            } else {
                train_binary(&examples, &label_config)?
            };
            Ok((label, model))
        })
        .collect()
}

fn train_category_models(
    extracted: &ExtractedCorpus,
    corpus: &AnnotatedCorpus,
    config: &TrainConfig,
) -> Result<BTreeMap<String, LinearModel>> {
    let labels: Vec<String> = corpus.taxonomy.category_names().map(str::to_string).collect();
    train_label_models(labels, config, |category| {
        extracted
            .aspect_features
            .iter()
            .zip(&extracted.gold)
            .map(|(fv, gold)| (fv, gold.categories.contains(category)))
            .collect()
    })
}

/// Polarity detectors. The positive and negative models see only
/// gold-polar sentences unless `on_all_sentences` (the flat arrangement)
/// is set; the polar-vs-neutral gate always trains on everything.
fn train_polarity_models(
    extracted: &ExtractedCorpus,
    config: &TrainConfig,
    on_all_sentences: bool,
) -> Result<PolarityModels> {
    let pairs = |select: fn(&SentenceGold) -> bool, polar_only: bool| {
        extracted
            .polarity_features
            .iter()
            .zip(&extracted.gold)
            .filter(|(_, gold)| !polar_only || gold.polar)
            .map(|(fv, gold)| (fv, select(gold)))
            .collect::<Vec<_>>()
    };
    let train_one = |name: &str, select: fn(&SentenceGold) -> bool, polar_only: bool| {
        let examples = pairs(select, polar_only);
        let label_config = TrainConfig {
            seed: label_seed(config.seed, name),
            ..config.clone()
        };
        if examples.is_empty() {
            Ok(LinearModel::constant_false(&label_config))
        } else {
            train_binary(&examples, &label_config)
        }
    };
    let gated = !on_all_sentences;
    Ok(PolarityModels {
        polar: train_one("polarity/polar", |g| g.polar, false)?,
        positive: train_one("polarity/positive", |g| g.positive, gated)?,
        negative: train_one("polarity/negative", |g| g.negative, gated)?,
    })
}

fn base_bundle(
    architecture: Architecture,
    corpus: &AnnotatedCorpus,
    vocab: Vocabulary,
    lexicons: Vec<Lexicon>,
    config: &TrainConfig,
) -> ModelBundle {
    ModelBundle {
        architecture,
        taxonomy: (*corpus.taxonomy).clone(),
        lexicon_digests: lexicon_digests(&lexicons),
        vocabulary: vocab,
        lexicons,
        category_models: BTreeMap::new(),
        aspect_models: BTreeMap::new(),
        polarity_models: PolarityModels {
            polar: LinearModel::constant_false(config),
            positive: LinearModel::constant_false(config),
            negative: LinearModel::constant_false(config),
        },
        trigger_terms: BTreeMap::new(),
        window: WindowSize::Infinite,
        train_config: config.clone(),
    }
}

fn fit_vocabulary(corpus: &AnnotatedCorpus) -> Result<Vocabulary> {
    let tokens: Vec<Vec<String>> = corpus.sentences().map(|s| tokenize(&s.text)).collect();
    Vocabulary::fit(&tokens)
}

/// Flat arrangement: every detector trains on all sentences with no
/// information flow between classifiers.
pub fn train_flat(
    corpus: &AnnotatedCorpus,
    lexicons: &[Lexicon],
    config: &TrainConfig,
) -> Result<ModelBundle> {
    let vocab = fit_vocabulary(corpus)?;
    let extracted = extract_corpus(corpus, &vocab, lexicons);
    let mut bundle = base_bundle(Architecture::Flat, corpus, vocab, lexicons.to_vec(), config);
    bundle.category_models = train_category_models(&extracted, corpus, config)?;
    let aspects: Vec<String> = corpus.taxonomy.aspect_names().map(str::to_string).collect();
    bundle.aspect_models = train_label_models(aspects, config, |aspect| {
        extracted
            .aspect_features
            .iter()
            .zip(&extracted.gold)
            .map(|(fv, gold)| (fv, gold.aspects.contains(aspect)))
            .collect()
    })?;
    bundle.polarity_models = train_polarity_models(&extracted, config, true)?;
    Ok(bundle)
}

/// Hierarchical arrangement: aspect detectors train only on sentences
/// gold-labeled with their category; positive/negative polarity
/// detectors train only on gold-polar sentences.
pub fn train_hierarchical(
    corpus: &AnnotatedCorpus,
    lexicons: &[Lexicon],
    config: &TrainConfig,
) -> Result<ModelBundle> {
    let vocab = fit_vocabulary(corpus)?;
    let extracted = extract_corpus(corpus, &vocab, lexicons);
    let mut bundle = base_bundle(
        Architecture::Hierarchical,
        corpus,
        vocab,
        lexicons.to_vec(),
        config,
    );
    bundle.category_models = train_category_models(&extracted, corpus, config)?;
    bundle.aspect_models = train_gated_aspect_models(&extracted, corpus, config)?;
    bundle.polarity_models = train_polarity_models(&extracted, config, false)?;
    Ok(bundle)
}

fn train_gated_aspect_models(
    extracted: &ExtractedCorpus,
    corpus: &AnnotatedCorpus,
    config: &TrainConfig,
) -> Result<BTreeMap<String, LinearModel>> {
    let taxonomy = corpus.taxonomy.clone();
    let aspects: Vec<String> = taxonomy.aspect_names().map(str::to_string).collect();
    train_label_models(aspects, config, move |aspect| {
        let category = taxonomy.category_of(aspect).expect("taxonomy aspect");
        extracted
            .aspect_features
            .iter()
            .zip(&extracted.gold)
            .filter(|(_, gold)| gold.categories.contains(category))
            .map(|(fv, gold)| (fv, gold.aspects.contains(aspect)))
            .collect()
    })
}

/// Propagation arrangement: categories as in flat; aspect detectors
/// train on all sentences with the trained category detectors' own
/// predictions (not gold labels) appended as indicator features.
pub fn train_propagation(
    corpus: &AnnotatedCorpus,
    lexicons: &[Lexicon],
    config: &TrainConfig,
) -> Result<ModelBundle> {
    let vocab = fit_vocabulary(corpus)?;
    let extracted = extract_corpus(corpus, &vocab, lexicons);
    let mut bundle = base_bundle(
        Architecture::Propagation,
        corpus,
        vocab,
        lexicons.to_vec(),
        config,
    );
    bundle.category_models = train_category_models(&extracted, corpus, config)?;

    let augmented: Vec<FeatureVector> = extracted
        .aspect_features
        .iter()
        .map(|fv| {
            let predicted = super::predict::categories_from_features(&bundle, fv);
            super::augment_with_categories(fv, &predicted, &bundle.taxonomy)
        })
        .collect();

    let aspects: Vec<String> = corpus.taxonomy.aspect_names().map(str::to_string).collect();
    bundle.aspect_models = train_label_models(aspects, config, |aspect| {
        augmented
            .iter()
            .zip(&extracted.gold)
            .map(|(fv, gold)| (fv, gold.aspects.contains(aspect)))
            .collect()
    })?;
    bundle.polarity_models = train_polarity_models(&extracted, config, false)?;
    Ok(bundle)
}

/// Aspect-specific polarity arrangement: hierarchical training plus
/// per-aspect trigger terms; at prediction time polarity is classified
/// over a window of `window` tokens around trigger matches.
pub fn train_aspect_polarity(
    corpus: &AnnotatedCorpus,
    lexicons: &[Lexicon],
    config: &TrainConfig,
    trigger_count: usize,
    window: WindowSize,
) -> Result<ModelBundle> {
    let mut bundle = train_hierarchical(corpus, lexicons, config)?;
    bundle.architecture = Architecture::AspectPolarity;
    bundle.trigger_terms = select_trigger_terms(corpus, trigger_count);
    bundle.window = window;
    Ok(bundle)
}

/// Training-set size and fit quality of one label's model.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelTrainStats {
    pub group: &'static str,
    pub label: String,
    pub examples: usize,
    pub positives: usize,
    pub accuracy: f64,
}

/// Recomputes, per label, the training-set size and final training
/// accuracy of a bundle on the corpus it was fitted to.
pub fn report_training(bundle: &ModelBundle, corpus: &AnnotatedCorpus) -> Vec<LabelTrainStats> {
    let extracted = extract_corpus(corpus, &bundle.vocabulary, &bundle.lexicons);
    let mut stats = Vec::new();

    let mut push = |group: &'static str,
                    label: &str,
                    model: &LinearModel,
                    examples: Vec<(&FeatureVector, bool)>| {
        stats.push(LabelTrainStats {
            group,
            label: label.to_string(),
            examples: examples.len(),
            positives: examples.iter().filter(|(_, y)| *y).count(),
            accuracy: training_accuracy(model, &examples),
        });
    };

    for (category, model) in &bundle.category_models {
        let examples = extracted
            .aspect_features
            .iter()
            .zip(&extracted.gold)
            .map(|(fv, gold)| (fv, gold.categories.contains(category)))
            .collect();
        push("category", category, model, examples);
    }

    let propagation = bundle.architecture == Architecture::Propagation;
    let gated = matches!(
        bundle.architecture,
        Architecture::Hierarchical | Architecture::AspectPolarity
    );
    let augmented: Vec<FeatureVector> = if propagation {
        extracted
            .aspect_features
            .iter()
            .map(|fv| {
                let predicted = super::predict::categories_from_features(bundle, fv);
                super::augment_with_categories(fv, &predicted, &bundle.taxonomy)
            })
            .collect()
    } else {
        Vec::new()
    };
    for (aspect, model) in &bundle.aspect_models {
        let category = bundle.taxonomy.category_of(aspect).expect("bundle taxonomy");
        let features = if propagation { &augmented } else { &extracted.aspect_features };
        let examples = features
            .iter()
            .zip(&extracted.gold)
            .filter(|(_, gold)| !gated || gold.categories.contains(category))
            .map(|(fv, gold)| (fv, gold.aspects.contains(aspect)))
            .collect();
        push("aspect", aspect, model, examples);
    }

    let polar_gated = bundle.architecture != Architecture::Flat;
    let polarity_examples = |select: fn(&SentenceGold) -> bool, gate: bool| {
        extracted
            .polarity_features
            .iter()
            .zip(&extracted.gold)
            .filter(|(_, gold)| !gate || gold.polar)
            .map(|(fv, gold)| (fv, select(gold)))
            .collect::<Vec<_>>()
    };
    push("polarity", "polar", &bundle.polarity_models.polar, polarity_examples(|g| g.polar, false));
    push(
        "polarity",
        "positive",
        &bundle.polarity_models.positive,
        polarity_examples(|g| g.positive, polar_gated),
    );
    push(
        "polarity",
        "negative",
        &bundle.polarity_models.negative,
        polarity_examples(|g| g.negative, polar_gated),
    );
    stats
}
