//! Prediction paths for the four arrangements.

use std::collections::{BTreeMap, BTreeSet};

use crate::architectures::{
    Architecture, ModelBundle, PolarityModels, PolarityOutcome, SentencePrediction, WindowSize,
};
use crate::features::{
    assemble, tokenize, FeatureFamily, FeatureId, FeatureProfile, FeatureVector,
};
use crate::learner::{predict, score};
use crate::taxonomy::{PolarityLabel, Taxonomy};
use crate::{Error, Result};

/// Category detector outputs for a ready-made aspect-profile vector.
pub(crate) fn categories_from_features(
    bundle: &ModelBundle,
    features: &FeatureVector,
) -> BTreeSet<String> {
    bundle
        .category_models
        .iter()
        .filter(|(_, model)| predict(model, features))
        .map(|(name, _)| name.clone())
        .collect()
}

/// Appends one indicator feature per predicted category. Categories that
/// did not fire contribute nothing, keeping the vector sparse.
pub fn augment_with_categories(
    features: &FeatureVector,
    predicted: &BTreeSet<String>,
    taxonomy: &Taxonomy,
) -> FeatureVector {
    let mut augmented = features.clone();
    for category in predicted {
        if let Some(index) = taxonomy.category_index(category) {
            augmented.set(
                FeatureId::new(FeatureFamily::CategoryIndicator, index as u64),
                1.0,
            );
        }
    }
    augmented
}

/// Polar-vs-neutral gate first; positive and negative detectors run only
/// behind it. When they disagree with each other (both fire or neither),
/// the higher raw score wins and an exact tie goes to positive.
fn polarity_cascade(models: &PolarityModels, features: &FeatureVector) -> PolarityLabel {
    if !predict(&models.polar, features) {
        return PolarityLabel::Neutral;
    }
    let positive = predict(&models.positive, features);
    let negative = predict(&models.negative, features);
    match (positive, negative) {
        (true, false) => PolarityLabel::Positive,
        (false, true) => PolarityLabel::Negative,
        _ => {
            if score(&models.positive, features) >= score(&models.negative, features) {
                PolarityLabel::Positive
            } else {
                PolarityLabel::Negative
            }
        }
    }
}

/// Union of the owning categories of `aspects`.
pub fn infer_categories(aspects: &BTreeSet<String>, taxonomy: &Taxonomy) -> Result<BTreeSet<String>> {
    aspects
        .iter()
        .map(|aspect| taxonomy.category_of(aspect).map(str::to_string))
        .collect()
}

/// Flat arrangement: all detectors run independently; contradictions
/// between levels are not repaired.
pub fn predict_flat(bundle: &ModelBundle, text: &str) -> Result<SentencePrediction> {
    bundle.expect_architecture(Architecture::Flat)?;
    let tokens = tokenize(text);
    let aspect_features = assemble(&tokens, &bundle.vocabulary, &bundle.lexicons, FeatureProfile::Aspect);
    let polarity_features =
        assemble(&tokens, &bundle.vocabulary, &bundle.lexicons, FeatureProfile::Polarity);
    let aspects = bundle
        .aspect_models
        .iter()
        .filter(|(_, model)| predict(model, &aspect_features))
        .map(|(name, _)| name.clone())
        .collect();
    Ok(SentencePrediction {
        categories: categories_from_features(bundle, &aspect_features),
        aspects,
        polarity: PolarityOutcome::Sentence(polarity_cascade(
            &bundle.polarity_models,
            &polarity_features,
        )),
    })
}

fn gated_aspects(
    bundle: &ModelBundle,
    categories: &BTreeSet<String>,
    aspect_features: &FeatureVector,
) -> BTreeSet<String> {
    let mut aspects = BTreeSet::new();
    for category in categories {
        let Some(index) = bundle.taxonomy.category_index(category) else {
            continue;
        };
        for aspect in &bundle.taxonomy.categories[index].aspects {
            if let Some(model) = bundle.aspect_models.get(aspect) {
                if predict(model, aspect_features) {
                    aspects.insert(aspect.clone());
                }
            }
        }
    }
    aspects
}

/// Hierarchical arrangement: aspect detectors run only inside predicted
/// categories; polarity cascades behind the polar-vs-neutral gate.
pub fn predict_hierarchical(bundle: &ModelBundle, text: &str) -> Result<SentencePrediction> {
    bundle.expect_architecture(Architecture::Hierarchical)?;
    let (prediction, _) = hierarchical_path(bundle, text);
    Ok(prediction)
}

/// Shared by the hierarchical and aspect-specific arrangements; returns
/// the tokens alongside so the caller can do window work.
fn hierarchical_path(bundle: &ModelBundle, text: &str) -> (SentencePrediction, Vec<String>) {
    let tokens = tokenize(text);
    let aspect_features = assemble(&tokens, &bundle.vocabulary, &bundle.lexicons, FeatureProfile::Aspect);
    let polarity_features =
        assemble(&tokens, &bundle.vocabulary, &bundle.lexicons, FeatureProfile::Polarity);
    let categories = categories_from_features(bundle, &aspect_features);
    let aspects = gated_aspects(bundle, &categories, &aspect_features);
    let prediction = SentencePrediction {
        categories,
        aspects,
        polarity: PolarityOutcome::Sentence(polarity_cascade(
            &bundle.polarity_models,
            &polarity_features,
        )),
    };
    (prediction, tokens)
}

/// Propagation arrangement: category outputs become features and every
/// aspect detector runs on the augmented vector.
pub fn predict_propagation(bundle: &ModelBundle, text: &str) -> Result<SentencePrediction> {
    bundle.expect_architecture(Architecture::Propagation)?;
    let tokens = tokenize(text);
    let aspect_features = assemble(&tokens, &bundle.vocabulary, &bundle.lexicons, FeatureProfile::Aspect);
    let polarity_features =
        assemble(&tokens, &bundle.vocabulary, &bundle.lexicons, FeatureProfile::Polarity);
    let categories = categories_from_features(bundle, &aspect_features);
    let augmented = augment_with_categories(&aspect_features, &categories, &bundle.taxonomy);
    let aspects = bundle
        .aspect_models
        .iter()
        .filter(|(_, model)| predict(model, &augmented))
        .map(|(name, _)| name.clone())
        .collect();
    Ok(SentencePrediction {
        categories,
        aspects,
        polarity: PolarityOutcome::Sentence(polarity_cascade(
            &bundle.polarity_models,
            &polarity_features,
        )),
    })
}

/// Sorted union of `[p - n, p + n]` index windows, clamped to the token
/// range.
fn window_indices(positions: &[usize], n: usize, len: usize) -> Vec<usize> {
    let mut included = BTreeSet::new();
    for &pos in positions {
        let start = pos.saturating_sub(n);
        let end = (pos + n).min(len.saturating_sub(1));
        for idx in start..=end {
            included.insert(idx);
        }
    }
    included.into_iter().collect()
}

/// Aspect-specific arrangement: aspects come from the hierarchical path;
/// each predicted aspect's polarity is classified over the union of
/// token windows around its trigger-term matches. Aspects without a
/// trigger match, and the infinite window, fall back to the whole
/// sentence.
pub fn predict_aspect_polarity(bundle: &ModelBundle, text: &str) -> Result<SentencePrediction> {
    bundle.expect_architecture(Architecture::AspectPolarity)?;
    let (base, tokens) = hierarchical_path(bundle, text);
    let sentence_polarity = base.sentence_polarity().expect("sentence-level base");

    let mut per_aspect = BTreeMap::new();
    for aspect in &base.aspects {
        let label = match bundle.window {
            WindowSize::Infinite => sentence_polarity,
            WindowSize::Tokens(n) => {
                let triggers = bundle.trigger_terms.get(aspect);
                let positions: Vec<usize> = tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, token)| {
                        triggers.is_some_and(|terms| terms.iter().any(|t| t == *token))
                    })
                    .map(|(idx, _)| idx)
                    .collect();
                if positions.is_empty() {
                    sentence_polarity
                } else {
                    let window_tokens: Vec<String> = window_indices(&positions, n, tokens.len())
                        .into_iter()
                        .map(|idx| tokens[idx].clone())
                        .collect();
                    let window_features = assemble(
                        &window_tokens,
                        &bundle.vocabulary,
                        &bundle.lexicons,
                        FeatureProfile::Polarity,
                    );
                    polarity_cascade(&bundle.polarity_models, &window_features)
                }
            }
        };
        per_aspect.insert(aspect.clone(), label);
    }

    Ok(SentencePrediction {
        categories: base.categories,
        aspects: base.aspects,
        polarity: PolarityOutcome::PerAspect(per_aspect),
    })
}

/// Verifies the hierarchical gating invariant: every predicted aspect's
/// category must be among the predicted categories.
pub fn check_gating(prediction: &SentencePrediction, taxonomy: &Taxonomy) -> Result<()> {
    for aspect in &prediction.aspects {
        let category = taxonomy.category_of(aspect)?;
        if !prediction.categories.contains(category) {
            return Err(Error::GatingViolation {
                aspect: aspect.clone(),
                category: category.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::architectures::{lexicon_digests, LexiconDigest};
    use crate::features::{assign_slots, Lexicon, LexiconKind, Vocabulary};
    use crate::learner::{LinearModel, TrainConfig, TrainMeta};
    use crate::taxonomy::Taxonomy;
    use std::collections::HashMap;

    fn window(positions: &[usize], n: usize, len: usize) -> Vec<usize> {
        window_indices(positions, n, len)
    }

    #[test]
    fn window_arithmetic_matches_examples() {
        assert_eq!(window(&[3], 1, 7), vec![2, 3, 4]);
        assert_eq!(window(&[0], 2, 7), vec![0, 1, 2]);
        assert_eq!(window(&[6], 2, 7), vec![4, 5, 6]);
        assert_eq!(window(&[1, 5], 1, 7), vec![0, 1, 2, 4, 5, 6]);
        assert_eq!(window(&[2, 3], 1, 7), vec![1, 2, 3, 4]);
    }

    #[test]
    fn infer_categories_unions_and_dedups() {
        let taxonomy = Taxonomy::bundled_default();
        let aspects: BTreeSet<String> =
            ["Supervision".to_string(), "Organization".to_string()].into();
        let categories = infer_categories(&aspects, &taxonomy).unwrap();
        assert_eq!(categories.len(), 1);
        assert!(categories.contains("Support and Organization"));
        assert!(infer_categories(&BTreeSet::new(), &taxonomy).unwrap().is_empty());
        let bad: BTreeSet<String> = ["Nope".to_string()].into();
        assert!(infer_categories(&bad, &taxonomy).is_err());
    }

    fn manual_model(weights: &[(FeatureId, f64)], bias: f64) -> LinearModel {
        LinearModel {
            weights: weights.iter().copied().collect::<HashMap<_, _>>(),
            bias,
            threshold: 0.5,
            meta: TrainMeta { epochs: 0, learning_rate: 0.1, l2: 0.0, seed: 0 },
        }
    }

    /// Bundle with hand-set weights: two one-aspect categories, polarity
    /// driven by a prior-scored lexicon.
    fn manual_aspect_polarity_bundle(window: WindowSize) -> ModelBundle {
        let taxonomy =
            Taxonomy::parse("# Teaching\nLecturer\n# Coursework\nAssignments\n").unwrap();
        let vocabulary = Vocabulary::fit(&[
            tokenize("the lecturer was entertaining but the course work was dreadful"),
        ])
        .unwrap();
        let mut lexicons = vec![Lexicon::new(
            "priors",
            LexiconKind::PriorScored,
            &[("entertaining", Some(1.0)), ("dreadful", Some(-1.0))],
        )
        .unwrap()];
        assign_slots(&mut lexicons);
        let positive_sum = crate::features::lexicon_feature_id(&lexicons[0], 0);
        let negative_sum = crate::features::lexicon_feature_id(&lexicons[0], 1);

        // category and aspect detectors always fire; the test exercises
        // the polarity windows, not detection
        let always = manual_model(&[], 10.0);
        let category_models: BTreeMap<String, LinearModel> = [
            ("Teaching".to_string(), always.clone()),
            ("Coursework".to_string(), always.clone()),
        ]
        .into();
        let aspect_models: BTreeMap<String, LinearModel> = [
            ("Lecturer".to_string(), always.clone()),
            ("Assignments".to_string(), always.clone()),
        ]
        .into();
        let polarity_models = PolarityModels {
            polar: manual_model(&[(positive_sum, 8.0), (negative_sum, 8.0)], -4.0),
            positive: manual_model(&[(positive_sum, 8.0)], -4.0),
            negative: manual_model(&[(negative_sum, 8.0)], -4.0),
        };
        let trigger_terms: BTreeMap<String, Vec<String>> = [
            ("Lecturer".to_string(), vec!["lecturer".to_string()]),
            ("Assignments".to_string(), vec!["course".to_string(), "work".to_string()]),
        ]
        .into();
        let digests: Vec<LexiconDigest> = lexicon_digests(&lexicons);
        ModelBundle {
            architecture: Architecture::AspectPolarity,
            taxonomy,
            vocabulary,
            lexicons,
            lexicon_digests: digests,
            category_models,
            aspect_models,
            polarity_models,
            trigger_terms,
            window,
            train_config: TrainConfig::default(),
        }
    }

    #[test]
    fn disjoint_windows_give_opposite_polarities() {
        let bundle = manual_aspect_polarity_bundle(WindowSize::Tokens(2));
        let prediction = predict_aspect_polarity(
            &bundle,
            "the lecturer was entertaining but the course work was dreadful",
        )
        .unwrap();
        let PolarityOutcome::PerAspect(per_aspect) = &prediction.polarity else {
            panic!("expected per-aspect polarity");
        };
        assert_eq!(per_aspect["Lecturer"], PolarityLabel::Positive);
        assert_eq!(per_aspect["Assignments"], PolarityLabel::Negative);
    }

    #[test]
    fn infinite_window_reduces_to_sentence_polarity() {
        let bundle = manual_aspect_polarity_bundle(WindowSize::Infinite);
        let text = "the lecturer was entertaining but the course work was dreadful";
        let prediction = predict_aspect_polarity(&bundle, text).unwrap();
        let PolarityOutcome::PerAspect(per_aspect) = &prediction.polarity else {
            panic!("expected per-aspect polarity");
        };
        // whole sentence has positive sum 1 and negative sum 1: the gate
        // fires, both detectors fire, tie resolution picks positive
        assert!(per_aspect.values().all(|&l| l == PolarityLabel::Positive));
    }

    #[test]
    fn aspect_without_trigger_match_falls_back_to_sentence() {
        let bundle = manual_aspect_polarity_bundle(WindowSize::Tokens(1));
        let prediction =
            predict_aspect_polarity(&bundle, "it was dreadful overall nothing else").unwrap();
        let PolarityOutcome::PerAspect(per_aspect) = &prediction.polarity else {
            panic!("expected per-aspect polarity");
        };
        // no trigger tokens present: every predicted aspect gets the
        // sentence-level negative
        assert!(per_aspect.values().all(|&l| l == PolarityLabel::Negative));
    }

    #[test]
    fn flat_with_no_firing_detector_is_empty_and_neutral() {
        let taxonomy = Taxonomy::parse("# Tuition\nBasic Tuition\n").unwrap();
        let vocabulary = Vocabulary::fit(&[tokenize("irgendein satz")]).unwrap();
        let never = manual_model(&[], -10.0);
        let bundle = ModelBundle {
            architecture: Architecture::Flat,
            category_models: [("Tuition".to_string(), never.clone())].into(),
            aspect_models: [("Basic Tuition".to_string(), never.clone())].into(),
            polarity_models: PolarityModels {
                polar: never.clone(),
                positive: never.clone(),
                negative: never.clone(),
            },
            taxonomy,
            vocabulary,
            lexicons: Vec::new(),
            lexicon_digests: Vec::new(),
            trigger_terms: BTreeMap::new(),
            window: WindowSize::Infinite,
            train_config: TrainConfig::default(),
        };
        let prediction = predict_flat(&bundle, "irgendein satz").unwrap();
        assert!(prediction.categories.is_empty());
        assert!(prediction.aspects.is_empty());
        assert_eq!(prediction.sentence_polarity(), Some(PolarityLabel::Neutral));
    }

    #[test]
    fn gating_checker_flags_inconsistent_outputs() {
        let taxonomy = Taxonomy::bundled_default();
        let ok = SentencePrediction {
            categories: ["Tuition".to_string()].into(),
            aspects: ["Basic Tuition".to_string()].into(),
            polarity: PolarityOutcome::Sentence(PolarityLabel::Neutral),
        };
        assert!(check_gating(&ok, &taxonomy).is_ok());
        let bad = SentencePrediction {
            categories: BTreeSet::new(),
            aspects: ["Basic Tuition".to_string()].into(),
            polarity: PolarityOutcome::Sentence(PolarityLabel::Neutral),
        };
        assert!(check_gating(&bad, &taxonomy).is_err());
    }

    #[test]
    fn augmenting_with_no_categories_is_identity() {
        let taxonomy = Taxonomy::bundled_default();
        let fv: FeatureVector =
            [(FeatureId::new(FeatureFamily::TfIdf, 3), 1.5)].into_iter().collect();
        let augmented = augment_with_categories(&fv, &BTreeSet::new(), &taxonomy);
        assert_eq!(augmented, fv);
    }

    #[test]
    fn augmented_ids_live_in_their_own_namespace() {
        let taxonomy = Taxonomy::bundled_default();
        let fv: FeatureVector =
            [(FeatureId::new(FeatureFamily::TfIdf, 0), 1.0)].into_iter().collect();
        let all: BTreeSet<String> = taxonomy.category_names().map(str::to_string).collect();
        let augmented = augment_with_categories(&fv, &all, &taxonomy);
        let indicator_ids: Vec<FeatureId> = augmented
            .iter()
            .filter(|(id, _)| id.family() == Some(FeatureFamily::CategoryIndicator))
            .map(|(id, _)| id)
            .collect();
        assert_eq!(indicator_ids.len(), 8);
        assert_eq!(augmented.len(), 9);
    }
}
