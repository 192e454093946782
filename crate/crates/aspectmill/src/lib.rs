//! Hierarchical multi-label classification of review sentences.
//!
//! The pipeline detects which coarse categories and fine-grained aspects
//! a sentence discusses and the sentiment polarity expressed, using one
//! binary linear classifier per label. Four classifier arrangements are
//! supported — flat, hierarchical gating, category propagation, and
//! aspect-specific polarity windows — all trained from the same
//! annotated-corpus format and served from a single bundle file.

pub mod architectures;
pub mod corpus;
mod error;
pub mod evaluation;
pub mod features;
pub mod fixture;
pub mod learner;
pub mod taxonomy;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
