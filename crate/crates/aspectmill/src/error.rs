use thiserror::Error;

/// All failure modes of the library surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("taxonomy parse error at line {line}: {message}")]
    TaxonomyParse { line: usize, message: String },

    #[error("duplicate {kind} name: {name:?}")]
    DuplicateName { kind: &'static str, name: String },

    #[error("category {0:?} has no aspects")]
    EmptyCategory(String),

    #[error("taxonomy has no categories")]
    EmptyTaxonomy,

    #[error("unknown aspect: {0:?}")]
    UnknownAspect(String),

    #[error("polarity score {0} out of range (expected -9..=9 or 99)")]
    ScoreOutOfRange(i32),

    #[error("corpus record {record}: {message}")]
    CorpusRecord { record: usize, message: String },

    #[error("duplicate review id: {0:?}")]
    DuplicateReviewId(String),

    #[error("corpus must contain at least 2 reviews to split, found {0}")]
    TooFewReviews(usize),

    #[error("lexicon {path:?} line {line}: {message}")]
    LexiconParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("bundle was trained as {trained} but used as {used}")]
    WrongArchitecture { trained: String, used: String },

    #[error("gating violation: aspect {aspect:?} predicted without its category {category:?}")]
    GatingViolation { aspect: String, category: String },

    #[error("unsupported bundle format version {found} (this build reads version {supported})")]
    BundleVersion { found: u32, supported: u32 },

    #[error("taxonomy mismatch: bundle and corpus were built against different taxonomies")]
    TaxonomyMismatch,

    #[error("gold and prediction vectors differ in length ({gold} vs {predicted})")]
    LengthMismatch { gold: usize, predicted: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
