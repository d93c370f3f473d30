//! Error type shared across the crate.

use alloc::string::String;
use alloc::vec::Vec;

/// All failure modes of the core pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Vocabulary fitting saw no tokens at all.
    #[error("empty corpus: no token survived tokenization")]
    EmptyCorpus,

    /// A label is not a member of the dataset's schema.
    #[error("unknown label {label:?} at row {row} (schema {schema:?})")]
    UnknownLabel {
        row: usize,
        label: String,
        schema: String,
    },

    /// A word-vector line has the wrong number of values.
    #[error("dimension mismatch at line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    /// A word-vector value failed to parse as a real number.
    #[error("malformed number {value:?} at line {line}")]
    MalformedNumber { line: usize, value: String },

    /// A sequence id points past the embedding matrix.
    #[error("token id {id} out of range (vocabulary size {vocab_size})")]
    IndexOutOfRange { id: usize, vocab_size: usize },

    /// NaN or Inf appeared in the middle of a computation.
    #[error("numeric failure ({context}): non-finite value encountered")]
    NumericFailure { context: String },

    /// A model/config combination violates its invariants.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Gradient check found tensors whose analytic and numeric gradients
    /// disagree beyond the tolerance.
    #[error("gradient check failed for tensors: {tensors:?}")]
    CheckFailed { tensors: Vec<String> },

    /// Fewer rows than the split protocol can partition.
    #[error("too few rows to split: {n} (need at least 5)")]
    TooFewRows { n: usize },

    /// Paired lists whose lengths must agree do not.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Class index outside 0..k.
    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },

    /// Metrics requested on a confusion matrix with no observations.
    #[error("empty confusion matrix: no evaluated rows")]
    EmptyMatrix,

    /// A serialized artifact (vocabulary, checkpoint) is corrupt.
    #[error("malformed {what}: {detail}")]
    MalformedArtifact { what: &'static str, detail: String },

    /// Dataset manifest text could not be parsed.
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
}
