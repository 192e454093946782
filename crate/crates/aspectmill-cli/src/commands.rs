//! Subcommand implementations. Reports and predictions go to stdout;
//! logs go to stderr.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use serde::{Deserialize, Serialize};

use aspectmill::architectures::{
    check_gating, report_training, train_aspect_polarity, train_flat, train_hierarchical,
    train_propagation, Architecture, ModelBundle, PolarityOutcome, SentencePrediction,
};
use aspectmill::corpus::{
    compute_stats, polarity_ranking, render_ranking, render_stats_table, split_corpus,
    AnnotatedCorpus, CorpusStats,
};
use aspectmill::evaluation::{evaluate_bundle, render_reports};
use aspectmill::features::{load_lexicon_dir, Lexicon};
use aspectmill::learner::TrainConfig;
use aspectmill::taxonomy::Taxonomy;

use crate::{CliError, EvalArgs, OutputFormat, PredictArgs, StatsArgs, TrainArgs};

type CliResult = Result<(), CliError>;

fn load_taxonomy(path: &Option<PathBuf>) -> Result<Arc<Taxonomy>, CliError> {
    Ok(Arc::new(match path {
        Some(path) => Taxonomy::load(path)?,
        None => Taxonomy::bundled_default(),
    }))
}

fn load_lexicons(dir: &Option<PathBuf>) -> Result<Vec<Lexicon>, CliError> {
    match dir {
        Some(dir) => {
            if !dir.is_dir() {
                return Err(CliError::User(format!(
                    "lexicon directory {} does not exist",
                    dir.display()
                )));
            }
            Ok(load_lexicon_dir(dir)?)
        }
        None => Ok(Vec::new()),
    }
}

pub fn train(args: TrainArgs) -> CliResult {
    info!(
        "train arch={} corpus={} bundle={} taxonomy={} lexicons={} split={} seed={} \
         epochs={} lr={} l2={} k={} n={}",
        args.arch,
        args.corpus.display(),
        args.bundle.display(),
        args.taxonomy.as_deref().map(Path::display).map_or("<bundled>".into(), |d| d.to_string()),
        args.lexicons.as_deref().map(Path::display).map_or("<none>".into(), |d| d.to_string()),
        args.split.map_or("off".into(), |f| f.to_string()),
        args.seed,
        args.epochs,
        args.lr,
        args.l2,
        args.k,
        args.n,
    );

    let taxonomy = load_taxonomy(&args.taxonomy)?;
    let lexicons = load_lexicons(&args.lexicons)?;
    let corpus = AnnotatedCorpus::load(&args.corpus, taxonomy)?;
    let corpus = match args.split {
        Some(fraction) => {
            let (train, test) = split_corpus(&corpus, fraction, args.seed)?;
            info!(
                "split: {} training reviews, {} held out (fraction {fraction}, seed {})",
                train.reviews.len(),
                test.reviews.len(),
                args.seed
            );
            train
        }
        None => corpus,
    };

    let config = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.lr,
        l2: args.l2,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let bundle = match args.arch {
        Architecture::Flat => train_flat(&corpus, &lexicons, &config)?,
        Architecture::Hierarchical => train_hierarchical(&corpus, &lexicons, &config)?,
        Architecture::Propagation => train_propagation(&corpus, &lexicons, &config)?,
        Architecture::AspectPolarity => {
            train_aspect_polarity(&corpus, &lexicons, &config, args.k, args.n)?
        }
    };

    for stats in report_training(&bundle, &corpus) {
        info!(
            "trained {}/{}: {} examples ({} positive), training accuracy {:.4}",
            stats.group, stats.label, stats.examples, stats.positives, stats.accuracy
        );
    }
    bundle.save(&args.bundle)?;
    info!("bundle written to {}", args.bundle.display());
    Ok(())
}

/// Prediction input: corpus records whose annotations, if any, are
/// ignored and need not validate against the bundle taxonomy.
#[derive(Deserialize)]
struct LooseReview {
    id: String,
    sentences: Vec<LooseSentence>,
}

#[derive(Deserialize)]
struct LooseSentence {
    text: String,
}

fn load_texts(path: &Path) -> Result<Vec<(String, Vec<String>)>, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::User(format!("reading corpus {}: {e}", path.display())))?;
    let mut reviews = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let review: LooseReview = serde_json::from_str(line)
            .map_err(|e| CliError::User(format!("corpus record {}: {e}", idx + 1)))?;
        reviews.push((
            review.id,
            review.sentences.into_iter().map(|s| s.text).collect(),
        ));
    }
    Ok(reviews)
}

#[derive(Serialize)]
struct PredictionRecord<'a> {
    review: &'a str,
    sentence: usize,
    #[serde(flatten)]
    prediction: &'a SentencePrediction,
}

fn render_polarity(outcome: &PolarityOutcome) -> String {
    match outcome {
        PolarityOutcome::Sentence(label) => label.to_string(),
        PolarityOutcome::PerAspect(map) => map
            .iter()
            .map(|(aspect, label)| format!("{aspect}={label}"))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

pub fn predict(args: PredictArgs) -> CliResult {
    info!(
        "predict bundle={} corpus={} format={:?} check={}",
        args.bundle.display(),
        args.corpus.display(),
        args.format,
        args.check
    );
    let bundle = ModelBundle::load(&args.bundle)?;
    let reviews = load_texts(&args.corpus)?;

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if args.format == OutputFormat::Table {
        let _ = writeln!(out, "review\tsentence\tcategories\taspects\tpolarity");
    }
    for (review_id, sentences) in &reviews {
        for (sentence_idx, text) in sentences.iter().enumerate() {
            let prediction = bundle.predict(text);
            if args.check {
                if let Err(violation) = check_gating(&prediction, &bundle.taxonomy) {
                    return Err(CliError::Internal(format!(
                        "review {review_id} sentence {sentence_idx}: {violation}"
                    )));
                }
            }
            match args.format {
                OutputFormat::Machine => {
                    let record = PredictionRecord {
                        review: review_id,
                        sentence: sentence_idx,
                        prediction: &prediction,
                    };
                    let _ = writeln!(out, "{}", serde_json::to_string(&record).expect("record"));
                }
                OutputFormat::Table => {
                    let join = |set: &std::collections::BTreeSet<String>| {
                        set.iter().cloned().collect::<Vec<_>>().join(";")
                    };
                    let _ = writeln!(
                        out,
                        "{review_id}\t{sentence_idx}\t{}\t{}\t{}",
                        join(&prediction.categories),
                        join(&prediction.aspects),
                        render_polarity(&prediction.polarity),
                    );
                }
            }
        }
    }
    Ok(())
}

pub fn eval(args: EvalArgs) -> CliResult {
    info!(
        "eval bundle={} test_corpus={} corpus={} split={} seed={} format={:?}",
        args.bundle.display(),
        args.test_corpus.as_deref().map(Path::display).map_or("<none>".into(), |d| d.to_string()),
        args.corpus.as_deref().map(Path::display).map_or("<none>".into(), |d| d.to_string()),
        args.split.map_or("off".into(), |f| f.to_string()),
        args.seed,
        args.format,
    );
    let bundle = ModelBundle::load(&args.bundle)?;
    let taxonomy = match &args.taxonomy {
        Some(path) => Arc::new(Taxonomy::load(path)?),
        None => Arc::new(bundle.taxonomy.clone()),
    };
    let corpus = match (&args.test_corpus, &args.corpus) {
        (Some(_), Some(_)) => {
            return Err(CliError::User(
                "pass either --test-corpus or --corpus (with --split), not both".into(),
            ))
        }
        (Some(path), None) => AnnotatedCorpus::load(path, taxonomy)?,
        (None, Some(path)) => {
            let full = AnnotatedCorpus::load(path, taxonomy)?;
            match args.split {
                Some(fraction) => {
                    let (_, test) = split_corpus(&full, fraction, args.seed)?;
                    info!("evaluating on {} held-out reviews", test.reviews.len());
                    test
                }
                None => full,
            }
        }
        (None, None) => {
            return Err(CliError::User(
                "one of --test-corpus or --corpus is required".into(),
            ))
        }
    };

    let reports = evaluate_bundle(&bundle, &corpus)?;
    match args.format {
        OutputFormat::Table => print!("{}", render_reports(&reports)),
        OutputFormat::Machine => {
            println!("{}", serde_json::to_string(&reports).expect("reports"))
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StatsDocument {
    stats: CorpusStats,
    ranking: Vec<(String, Option<f64>)>,
}

pub fn stats(args: StatsArgs) -> CliResult {
    info!(
        "stats corpus={} taxonomy={} format={:?}",
        args.corpus.display(),
        args.taxonomy.as_deref().map(Path::display).map_or("<bundled>".into(), |d| d.to_string()),
        args.format,
    );
    let taxonomy = load_taxonomy(&args.taxonomy)?;
    let corpus = AnnotatedCorpus::load(&args.corpus, taxonomy)?;
    let stats = compute_stats(&corpus);
    match args.format {
        OutputFormat::Table => {
            print!("{}", render_stats_table(&stats));
            println!();
            print!("{}", render_ranking(&stats));
        }
        OutputFormat::Machine => {
            let document = StatsDocument {
                ranking: polarity_ranking(&stats),
                stats,
            };
            println!("{}", serde_json::to_string(&document).expect("stats"));
        }
    }
    Ok(())
}
