//! Exact cosine top-k retrieval over hybrid vectors.
//!
//! Two scoring paths exist: an exhaustive scan and an inverted-index path
//! that walks postings for the concept part. Both accumulate products in
//! the same order and share the final normalization, so they agree bit for
//! bit, including tie order.

mod index;
mod ranked;

use thiserror::Error;

use crate::vectorizer::HybridVector;

pub use index::{build_index, CorpusIndex, IndexConfig};
pub use ranked::{RankedItem, RankedList};

#[derive(Debug, Error, PartialEq)]
pub enum RetrievalError {
    #[error("{part} dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        part: &'static str,
        left: usize,
        right: usize,
    },
    #[error("unknown query {0}")]
    UnknownQuery(String),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("no embedding for paper {0}")]
    MissingEmbedding(String),
    #[error("embeddings are required when the dense part is enabled")]
    NoEmbeddings,
    #[error("index configuration enables neither concepts nor embeddings")]
    EmptyConfig,
    #[error("duplicate document {0}")]
    DuplicateDocument(String),
}

/// Cosine of the two concatenated vectors. Zero-norm inputs score 0.
pub fn cosine(a: &HybridVector, b: &HybridVector) -> Result<f64, RetrievalError> {
    check_dims(a, b)?;
    let dot = a.sparse().dot(b.sparse()) + a.dense().dot(b.dense());
    Ok(normalize(dot, a.norm(), b.norm()))
}

pub(crate) fn check_dims(a: &HybridVector, b: &HybridVector) -> Result<(), RetrievalError> {
    if a.sparse_dims() != b.sparse_dims() {
        return Err(RetrievalError::DimensionMismatch {
            part: "concept",
            left: a.sparse_dims(),
            right: b.sparse_dims(),
        });
    }
    if a.dense_dims() != b.dense_dims() {
        return Err(RetrievalError::DimensionMismatch {
            part: "embedding",
            left: a.dense_dims(),
            right: b.dense_dims(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn normalize(dot: f64, norm_a: f64, norm_b: f64) -> f64 {
    if norm_a == 0.0 || norm_b == 0.0 {
        return 0.0;
    }
    (dot / (norm_a * norm_b)).clamp(-1.0, 1.0)
}
