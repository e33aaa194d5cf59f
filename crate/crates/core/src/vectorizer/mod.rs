//! Concept vectors, dense document embeddings and their hybrid
//! concatenation.

mod dense;
mod hybrid;
mod sparse;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::kg_store::{ConceptType, KnowledgeGraph};

pub use dense::{load_embeddings, random_embeddings, DenseVector, EmbeddingTable, LoadError};
pub use hybrid::{hybrid_vector, HybridVector};
pub use sparse::SparseVector;

#[derive(Debug, Error, PartialEq)]
pub enum VectorError {
    #[error("unknown paper {0}")]
    UnknownPaper(String),
    #[error("invalid sparse vector: {0}")]
    InvalidSparse(String),
    #[error("dense vector must have at least one component")]
    EmptyDense,
    #[error("non-finite component at position {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate embedding for paper {0}")]
    DuplicateId(String),
    #[error("a hybrid vector needs a concept part, an embedding part, or both")]
    BothPartsAbsent,
}

/// Subset of concept types admitted into a concept vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TypeFilter(u8);

impl TypeFilter {
    pub fn all() -> Self {
        TypeFilter(0b1111)
    }

    pub fn only(concept_type: ConceptType) -> Self {
        TypeFilter(concept_type.bit())
    }

    /// Returns `None` for an empty set of types.
    pub fn from_types<I: IntoIterator<Item = ConceptType>>(types: I) -> Option<Self> {
        let bits = types.into_iter().fold(0u8, |acc, t| acc | t.bit());
        (bits != 0).then_some(TypeFilter(bits))
    }

    pub fn allows(self, concept_type: ConceptType) -> bool {
        self.0 & concept_type.bit() != 0
    }

    pub fn is_all(self) -> bool {
        self == TypeFilter::all()
    }

    pub fn types(self) -> impl Iterator<Item = ConceptType> {
        ConceptType::ALL
            .into_iter()
            .filter(move |t| self.allows(*t))
    }
}

impl Default for TypeFilter {
    fn default() -> Self {
        TypeFilter::all()
    }
}

impl FromStr for TypeFilter {
    type Err = String;

    /// Parses the short codes `m` (material), `p` (process), `d` (data) and
    /// `me` (method), or full type names, separated by commas.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut types = Vec::new();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let t = match token.to_ascii_lowercase().as_str() {
                "m" => ConceptType::Material,
                "p" => ConceptType::Process,
                "d" => ConceptType::Data,
                "me" => ConceptType::Method,
                "all" => return Ok(TypeFilter::all()),
                other => other
                    .parse()
                    .map_err(|_| format!("unknown concept type {token:?}"))?,
            };
            types.push(t);
        }
        TypeFilter::from_types(types).ok_or_else(|| "empty concept type filter".to_string())
    }
}

impl fmt::Display for TypeFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<&str> = self
            .types()
            .map(|t| match t {
                ConceptType::Material => "m",
                ConceptType::Process => "p",
                ConceptType::Data => "d",
                ConceptType::Method => "me",
            })
            .collect();
        f.write_str(&codes.join(","))
    }
}

/// Binary concept vector of the paper at `ordinal`: a 1 at every linked
/// concept whose type passes `filter`, over all `|E|` dimensions.
pub fn concept_vector_at(kg: &KnowledgeGraph, ordinal: usize, filter: TypeFilter) -> SparseVector {
    let concepts = kg.concepts();
    let entries: Vec<(u32, f64)> = kg
        .paper_concepts(ordinal)
        .iter()
        .filter(|c| filter.allows(concepts[c.index()].concept_type))
        .map(|c| (c.0, 1.0))
        .collect();
    SparseVector::from_sorted_unchecked(kg.concept_count(), entries)
}

pub fn concept_vector(
    kg: &KnowledgeGraph,
    paper_id: &str,
    filter: TypeFilter,
) -> Result<SparseVector, VectorError> {
    let ordinal = kg
        .ordinal(paper_id)
        .ok_or_else(|| VectorError::UnknownPaper(paper_id.to_string()))?;
    Ok(concept_vector_at(kg, ordinal, filter))
}
