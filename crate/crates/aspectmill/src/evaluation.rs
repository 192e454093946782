//! Confusion counts, precision/recall/F1, micro/macro averaging, and
//! whole-bundle scoring against a gold corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::architectures::{
    build_targets, infer_categories, Architecture, ModelBundle, PolarityOutcome,
    SentencePrediction,
};
use crate::corpus::AnnotatedCorpus;
use crate::taxonomy::PolarityLabel;
use crate::{Error, Result};

/// 2x2 confusion counts for one label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    fn pool(&mut self, other: &ConfusionCounts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }
}

/// Exact counts over aligned gold/predicted membership vectors.
pub fn count_label(gold: &[bool], predicted: &[bool]) -> Result<ConfusionCounts> {
    if gold.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (&g, &p) in gold.iter().zip(predicted) {
        match (g, p) {
            (true, true) => counts.tp += 1,
            (false, true) => counts.fp += 1,
            (true, false) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    Ok(counts)
}

/// Precision, recall, F1. `None` marks an undefined (0/0) value; the
/// averaging layer substitutes zero for those and counts a warning.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// `P = tp/(tp+fp)`, `R = tp/(tp+fn)`, `F1 = 2PR/(P+R)`.
///
/// A zero denominator makes the value undefined; F1 with both P and R
/// defined but zero is 0.
pub fn prf(counts: &ConfusionCounts) -> Prf {
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let precision = ratio(counts.tp, counts.tp + counts.fp);
    let recall = ratio(counts.tp, counts.tp + counts.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    Prf { precision, recall, f1 }
}

/// F1 from already-rounded percentage precision and recall.
pub fn f1_from_pr(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Unweighted mean over labels; undefined values count as zero. Returns
/// the averages and the number of substitutions made.
pub fn macro_average(reports: &[Prf]) -> (Prf, u32) {
    assert!(!reports.is_empty(), "macro average needs at least one label");
    let mut warnings = 0u32;
    let mut sum = [0.0f64; 3];
    for report in reports {
        for (slot, value) in [report.precision, report.recall, report.f1].iter().enumerate() {
            match value {
                Some(v) => sum[slot] += v,
                None => warnings += 1,
            }
        }
    }
    let n = reports.len() as f64;
    (
        Prf {
            precision: Some(sum[0] / n),
            recall: Some(sum[1] / n),
            f1: Some(sum[2] / n),
        },
        warnings,
    )
}

/// Pools tp/fp/fn/tn over labels, then applies the P/R/F1 formulas.
pub fn micro_average(counts: &[ConfusionCounts]) -> Prf {
    assert!(!counts.is_empty(), "micro average needs at least one label");
    let mut pooled = ConfusionCounts::default();
    for c in counts {
        pooled.pool(c);
    }
    prf(&pooled)
}

/// Which label family a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelGroup {
    Categories,
    InferredCategories,
    Aspects,
    Polarity,
}

impl LabelGroup {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelGroup::Categories => "Categories",
            LabelGroup::InferredCategories => "Categ. (Infer.)",
            LabelGroup::Aspects => "Aspects",
            LabelGroup::Polarity => "Polarity",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub counts: ConfusionCounts,
    pub prf: Prf,
}

/// Per-label and averaged metrics for one label group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub group: LabelGroup,
    pub per_label: BTreeMap<String, LabelMetrics>,
    pub macro_avg: Prf,
    pub micro_avg: Prf,
    /// Undefined metric components substituted with zero in the macro
    /// average.
    pub undefined_substitutions: u32,
}

/// Builds one report from aligned per-sentence gold and predicted label
/// sets.
pub fn score_label_sets(
    group: LabelGroup,
    labels: &[String],
    gold: &[BTreeSet<String>],
    predicted: &[BTreeSet<String>],
) -> Result<MetricsReport> {
    if gold.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let mut per_label = BTreeMap::new();
    let mut prfs = Vec::new();
    let mut all_counts = Vec::new();
    for label in labels {
        let gold_membership: Vec<bool> = gold.iter().map(|s| s.contains(label)).collect();
        let predicted_membership: Vec<bool> =
            predicted.iter().map(|s| s.contains(label)).collect();
        let counts = count_label(&gold_membership, &predicted_membership)?;
        let metrics = prf(&counts);
        prfs.push(metrics);
        all_counts.push(counts);
        per_label.insert(label.clone(), LabelMetrics { counts, prf: metrics });
    }
    let (macro_avg, undefined_substitutions) = macro_average(&prfs);
    Ok(MetricsReport {
        group,
        per_label,
        macro_avg,
        micro_avg: micro_average(&all_counts),
        undefined_substitutions,
    })
}

const POLARITY_LABELS: [&str; 4] = ["Positive", "Negative", "Neutral", "Polar"];

fn polarity_gold_set(positive: bool, negative: bool, polar: bool) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    if positive {
        set.insert("Positive".to_string());
    }
    if negative {
        set.insert("Negative".to_string());
    }
    if polar {
        set.insert("Polar".to_string());
    } else {
        set.insert("Neutral".to_string());
    }
    set
}

fn polarity_predicted_set(label: PolarityLabel) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    match label {
        PolarityLabel::Positive => {
            set.insert("Positive".to_string());
            set.insert("Polar".to_string());
        }
        PolarityLabel::Negative => {
            set.insert("Negative".to_string());
            set.insert("Polar".to_string());
        }
        PolarityLabel::Neutral => {
            set.insert("Neutral".to_string());
        }
        PolarityLabel::Mixed => unreachable!("classifiers never emit mixed"),
    }
    set
}

/// Scores a bundle on a gold corpus.
///
/// Emits reports for direct category detection, categories inferred from
/// predicted aspects (skipped for flat bundles, which have no gating
/// story to repair), aspect detection, and polarity. For the
/// aspect-specific arrangement the polarity unit is the (sentence,
/// aspect) pair; otherwise it is the sentence.
pub fn evaluate_bundle(bundle: &ModelBundle, corpus: &AnnotatedCorpus) -> Result<Vec<MetricsReport>> {
    if bundle.taxonomy != *corpus.taxonomy {
        return Err(Error::TaxonomyMismatch);
    }
    let gold = build_targets(corpus);
    let predictions: Vec<SentencePrediction> =
        corpus.sentences().map(|s| bundle.predict(&s.text)).collect();

    let category_labels: Vec<String> =
        bundle.taxonomy.category_names().map(str::to_string).collect();
    let aspect_labels: Vec<String> = bundle.taxonomy.aspect_names().map(str::to_string).collect();

    let gold_categories: Vec<BTreeSet<String>> =
        gold.iter().map(|g| g.categories.clone()).collect();
    let gold_aspects: Vec<BTreeSet<String>> = gold.iter().map(|g| g.aspects.clone()).collect();

    let mut reports = Vec::new();
    reports.push(score_label_sets(
        LabelGroup::Categories,
        &category_labels,
        &gold_categories,
        &predictions.iter().map(|p| p.categories.clone()).collect::<Vec<_>>(),
    )?);

    if bundle.architecture != Architecture::Flat {
        let inferred: Vec<BTreeSet<String>> = predictions
            .iter()
            .map(|p| infer_categories(&p.aspects, &bundle.taxonomy))
            .collect::<Result<_>>()?;
        reports.push(score_label_sets(
            LabelGroup::InferredCategories,
            &category_labels,
            &gold_categories,
            &inferred,
        )?);
    }

    reports.push(score_label_sets(
        LabelGroup::Aspects,
        &aspect_labels,
        &gold_aspects,
        &predictions.iter().map(|p| p.aspects.clone()).collect::<Vec<_>>(),
    )?);

    let polarity_labels: Vec<String> = POLARITY_LABELS.iter().map(|s| s.to_string()).collect();
    let report = if bundle.architecture == Architecture::AspectPolarity {
        // unit: (sentence, aspect) pairs over the full cross product
        let mut gold_sets = Vec::new();
        let mut predicted_sets = Vec::new();
        for ((sentence, prediction), _) in
            corpus.sentences().zip(&predictions).zip(&gold)
        {
            for aspect in &aspect_labels {
                let annotation = sentence
                    .annotations
                    .iter()
                    .find(|a| a.aspect.trim() == aspect.as_str());
                let gold_set = match annotation {
                    Some(a) => match a.score {
                        99 => polarity_gold_set(true, true, true),
                        0 => polarity_gold_set(false, false, false),
                        s if s > 0 => polarity_gold_set(true, false, true),
                        _ => polarity_gold_set(false, true, true),
                    },
                    // unannotated pair: nothing polar to find, and the
                    // Neutral row scores only annotated-neutral mentions
                    None => BTreeSet::new(),
                };
                let predicted_set = match &prediction.polarity {
                    PolarityOutcome::PerAspect(map) => map
                        .get(aspect)
                        .map(|&l| polarity_predicted_set(l))
                        .unwrap_or_default(),
                    PolarityOutcome::Sentence(_) => BTreeSet::new(),
                };
                gold_sets.push(gold_set);
                predicted_sets.push(predicted_set);
            }
        }
        score_label_sets(LabelGroup::Polarity, &polarity_labels, &gold_sets, &predicted_sets)?
    } else {
        // unit: sentences
        let gold_sets: Vec<BTreeSet<String>> = gold
            .iter()
            .map(|g| polarity_gold_set(g.positive, g.negative, g.polar))
            .collect();
        let predicted_sets: Vec<BTreeSet<String>> = predictions
            .iter()
            .map(|p| match &p.polarity {
                PolarityOutcome::Sentence(label) => polarity_predicted_set(*label),
                PolarityOutcome::PerAspect(_) => unreachable!("sentence-level arrangement"),
            })
            .collect();
        score_label_sets(LabelGroup::Polarity, &polarity_labels, &gold_sets, &predicted_sets)?
    };
    reports.push(report);
    Ok(reports)
}

fn percent(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.1}", v * 100.0),
        None => "undef".to_string(),
    }
}

/// Tab-separated rendering: one row per group with macro and micro
/// averages, then a polarity detail block with one row per polarity
/// label.
pub fn render_reports(reports: &[MetricsReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Group\tMacroP\tMacroR\tMacroF\tMicroP\tMicroR\tMicroF\tWarnings");
    for report in reports {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            report.group.as_str(),
            percent(report.macro_avg.precision),
            percent(report.macro_avg.recall),
            percent(report.macro_avg.f1),
            percent(report.micro_avg.precision),
            percent(report.micro_avg.recall),
            percent(report.micro_avg.f1),
            report.undefined_substitutions,
        );
    }
    for report in reports {
        if report.group != LabelGroup::Polarity {
            continue;
        }
        let _ = writeln!(out, "\nPolarity\tP\tR\tF");
        for label in POLARITY_LABELS {
            if let Some(metrics) = report.per_label.get(label) {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    label,
                    percent(metrics.prf.precision),
                    percent(metrics.prf.recall),
                    percent(metrics.prf.f1),
                );
            }
        }
    }
    out
}
