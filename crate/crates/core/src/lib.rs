//! Global citation recommendation by cosine ranking over hybrid vectors: a
//! binary concept vector taken from a research knowledge graph,
//! concatenated with a dense document embedding.
//!
//! * [`kg_store`] ingests papers, concept mentions and citations.
//! * [`vectorizer`] builds concept vectors, loads embeddings and assembles
//!   hybrid vectors.
//! * [`retrieval`] ranks the whole corpus for a query, exactly.
//! * [`eval`] implements query selection, AP@k / MAP@k and the benchmark
//!   matrix.
//! * [`synthetic`] generates seeded corpora with planted structure.

pub mod eval;
pub mod kg_store;
pub mod retrieval;
pub mod synthetic;
pub mod vectorizer;
