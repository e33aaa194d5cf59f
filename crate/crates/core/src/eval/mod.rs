//! Benchmark protocol: query selection, precision and average precision
//! at k, MAP over a query set, the configuration matrix, and pairwise
//! similarity statistics for citing versus random paper pairs.

mod benchmark;
mod metrics;
mod pairs;
mod queries;

use thiserror::Error;

use crate::retrieval::RetrievalError;
use crate::vectorizer::VectorError;

pub use benchmark::{
    ablation_row_label, combined_row_label, concept_row_label, evaluate_config, run_benchmark,
    BenchmarkConfig, EvalReport, KgVariants, ReportRow, ABLATION_ORDER, RANDOM_DIM, RANDOM_LABEL,
};
pub use metrics::{
    average_precision_at_k, map_at_k, map_at_ks, per_query_average_precision, precision_at_k,
};
pub use pairs::{pair_similarity_stats, PairStats, Population};
pub use queries::{select_queries, Query, QuerySet, DEFAULT_MIN_CITATIONS};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k values must be non-empty, positive and strictly ascending: {0:?}")]
    InvalidKValues(Vec<usize>),
    #[error("query {0} has no relevant documents")]
    EmptyRelevant(String),
    #[error("no queries to evaluate")]
    EmptyQuerySet,
    #[error("no embeddings loaded for label {0}")]
    MissingEmbedding(String),
    #[error("no knowledge graph supplied")]
    NoKnowledgeGraph,
    #[error("KG variants disagree: {0}")]
    VariantMismatch(String),
    #[error("the knowledge graph has no citation edges")]
    NoCitations,
    #[error("every ordered paper pair is a citation; no random pairs exist")]
    NoRandomPairs,
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Vector(#[from] VectorError),
}
