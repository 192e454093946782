//! Binary linear classifier: logistic regression fitted by stochastic
//! gradient descent with L2 regularization.
//!
//! One such model backs every category, aspect, and polarity decision in
//! a one-vs-rest arrangement. Training is deterministic: a fixed config,
//! seed, and example order always produce bit-identical weights. The L2
//! decay is applied through a running scale factor so each step stays
//! O(active features).

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::{FeatureId, FeatureVector};
use crate::{Error, Result};

/// Bias used for constant-false models built from empty training sets.
pub const CONSTANT_FALSE_BIAS: f64 = -25.0;

/// Hyperparameters for one SGD run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
    pub shuffle: bool,
    /// Weight positive examples by `negatives/positives` (capped at 10)
    /// to counter class imbalance. Off by default.
    pub balance_classes: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            learning_rate: 0.1,
            l2: 1e-4,
            seed: 0,
            shuffle: true,
            balance_classes: false,
        }
    }
}

/// Training provenance kept with each model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

/// Sparse weight vector, bias, and decision threshold of one binary
/// classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    #[serde(with = "weights_as_pairs")]
    pub weights: HashMap<FeatureId, f64>,
    pub bias: f64,
    /// Applied to the squashed score; scores meeting it exactly count as
    /// positive.
    pub threshold: f64,
    pub meta: TrainMeta,
}

/// Serializes the weight map as an id-sorted pair list so model files are
/// byte-stable.
mod weights_as_pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        weights: &HashMap<FeatureId, f64>,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut pairs: Vec<(FeatureId, f64)> = weights.iter().map(|(&k, &v)| (k, v)).collect();
        pairs.sort_by_key(|(id, _)| *id);
        serde::Serialize::serialize(&pairs, serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<HashMap<FeatureId, f64>, D::Error> {
        let pairs: Vec<(FeatureId, f64)> = serde::Deserialize::deserialize(deserializer)?;
        Ok(pairs.into_iter().collect())
    }
}

impl LinearModel {
    /// A model that scores every input below any threshold in (0, 1).
    pub fn constant_false(config: &TrainConfig) -> Self {
        LinearModel {
            weights: HashMap::new(),
            bias: CONSTANT_FALSE_BIAS,
            threshold: 0.5,
            meta: TrainMeta {
                epochs: 0,
                learning_rate: config.learning_rate,
                l2: config.l2,
                seed: config.seed,
            },
        }
    }

    fn raw(&self, features: &FeatureVector) -> f64 {
        let mut z = self.bias;
        for (id, value) in features.iter() {
            if let Some(w) = self.weights.get(&id) {
                z += w * value;
            }
        }
        z
    }
}

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Squashed affine score in (0, 1). Feature ids the model never saw
/// contribute nothing.
pub fn score(model: &LinearModel, features: &FeatureVector) -> f64 {
    sigmoid(model.raw(features))
}

/// Thresholded decision; a score exactly at the threshold is positive.
pub fn predict(model: &LinearModel, features: &FeatureVector) -> bool {
    score(model, features) >= model.threshold
}

/// Fits a logistic-regression model on `examples`.
///
/// Runs `config.epochs` passes of plain SGD, reshuffling the example
/// order each epoch from a ChaCha stream seeded with `config.seed`.
pub fn train_binary(
    examples: &[(&FeatureVector, bool)],
    config: &TrainConfig,
) -> Result<LinearModel> {
    if examples.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }

    let positive_weight = if config.balance_classes {
        let positives = examples.iter().filter(|(_, y)| *y).count();
        let negatives = examples.len() - positives;
        if positives == 0 || negatives == 0 {
            1.0
        } else {
            (negatives as f64 / positives as f64).min(10.0)
        }
    } else {
        1.0
    };

    let mut weights: HashMap<FeatureId, f64> = HashMap::new();
    let mut bias = 0.0;
    // weights are stored as w = scale * v; L2 decay only touches scale
    let mut scale = 1.0f64;
    let decay = 1.0 - config.learning_rate * config.l2;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();

    for _ in 0..config.epochs {
        if config.shuffle {
            order.shuffle(&mut rng);
        }
        for &idx in &order {
            let (features, label) = &examples[idx];
            let mut z = bias;
            for (id, value) in features.iter() {
                if let Some(v) = weights.get(&id) {
                    z += scale * v * value;
                }
            }
            let target = if *label { 1.0 } else { 0.0 };
            let example_weight = if *label { positive_weight } else { 1.0 };
            let gradient = (sigmoid(z) - target) * example_weight;

            scale *= decay;
            if scale < 1e-9 {
                for v in weights.values_mut() {
                    *v *= scale;
                }
                scale = 1.0;
            }
            let step = config.learning_rate * gradient / scale;
            for (id, value) in features.iter() {
                *weights.entry(id).or_insert(0.0) -= step * value;
            }
            bias -= config.learning_rate * gradient;
        }
    }

    let weights: HashMap<FeatureId, f64> = weights
        .into_iter()
        .map(|(id, v)| (id, v * scale))
        .filter(|(_, w)| *w != 0.0)
        .collect();
    debug_assert!(weights.values().all(|w| w.is_finite()));

    Ok(LinearModel {
        weights,
        bias,
        threshold: 0.5,
        meta: TrainMeta {
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            l2: config.l2,
            seed: config.seed,
        },
    })
}

/// Mean regularized logistic loss and its gradient over `examples` at
/// the given parameters. The gradient layout is `(d/dw for each id in
/// `weight_ids` order, d/db)`.
pub fn batch_loss_and_gradient(
    examples: &[(&FeatureVector, bool)],
    weight_ids: &[FeatureId],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>) {
    let id_index: HashMap<FeatureId, usize> =
        weight_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let n = examples.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![0.0; weights.len() + 1];
    for (features, label) in examples {
        let mut z = bias;
        for (id, value) in features.iter() {
            if let Some(&i) = id_index.get(&id) {
                z += weights[i] * value;
            }
        }
        let target = if *label { 1.0 } else { 0.0 };
        // log(1 + exp(-|z|)) form avoids overflow
        loss += z.max(0.0) - z * target + (1.0 + (-z.abs()).exp()).ln();
        let err = sigmoid(z) - target;
        for (id, value) in features.iter() {
            if let Some(&i) = id_index.get(&id) {
                grad[i] += err * value;
            }
        }
        grad[weights.len()] += err;
    }
    loss /= n;
    for g in grad.iter_mut() {
        *g /= n;
    }
    for (i, w) in weights.iter().enumerate() {
        loss += 0.5 * l2 * w * w;
        grad[i] += l2 * w;
    }
    (loss, grad)
}

/// Fraction of examples the model labels correctly.
pub fn training_accuracy(model: &LinearModel, examples: &[(&FeatureVector, bool)]) -> f64 {
    if examples.is_empty() {
        return 1.0;
    }
    let correct = examples
        .iter()
        .filter(|(fv, y)| predict(model, fv) == *y)
        .count();
    correct as f64 / examples.len() as f64
}
