use std::cmp::Ordering;
use std::collections::HashMap;

use super::{check_dims, cosine, normalize, RankedItem, RankedList, RetrievalError};
use crate::kg_store::KnowledgeGraph;
use crate::vectorizer::{
    concept_vector_at, hybrid_vector, EmbeddingTable, HybridVector, TypeFilter,
};

/// Which parts of the hybrid vector an index is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexConfig {
    pub use_concepts: bool,
    pub type_filter: TypeFilter,
    pub use_dense: bool,
}

impl IndexConfig {
    pub fn concepts_only(type_filter: TypeFilter) -> Self {
        IndexConfig {
            use_concepts: true,
            type_filter,
            use_dense: false,
        }
    }

    pub fn dense_only() -> Self {
        IndexConfig {
            use_concepts: false,
            type_filter: TypeFilter::all(),
            use_dense: true,
        }
    }

    pub fn hybrid(type_filter: TypeFilter) -> Self {
        IndexConfig {
            use_concepts: true,
            type_filter,
            use_dense: true,
        }
    }
}

/// Every corpus document as a hybrid vector, with cached norms and
/// postings lists for the concept part. Documents are ordered by id.
#[derive(Debug, Clone)]
pub struct CorpusIndex {
    doc_ids: Vec<String>,
    ordinals: HashMap<String, usize>,
    hybrids: Vec<HybridVector>,
    norms: Vec<f64>,
    // postings[dim] = (doc ordinal, value), ascending by ordinal.
    postings: Vec<Vec<(u32, f64)>>,
}

pub fn build_index(
    kg: &KnowledgeGraph,
    embeddings: Option<&EmbeddingTable>,
    config: IndexConfig,
) -> Result<CorpusIndex, RetrievalError> {
    if !config.use_concepts && !config.use_dense {
        return Err(RetrievalError::EmptyConfig);
    }
    let embeddings = match (config.use_dense, embeddings) {
        (true, None) => return Err(RetrievalError::NoEmbeddings),
        (true, Some(e)) => Some(e),
        (false, _) => None,
    };
    let docs = kg
        .papers()
        .iter()
        .enumerate()
        .map(|(ordinal, paper)| {
            let sparse = config
                .use_concepts
                .then(|| concept_vector_at(kg, ordinal, config.type_filter));
            let dense = match embeddings {
                Some(table) => Some(
                    table
                        .get(&paper.id)
                        .cloned()
                        .ok_or_else(|| RetrievalError::MissingEmbedding(paper.id.clone()))?,
                ),
                None => None,
            };
            let hybrid = hybrid_vector(sparse, dense).expect("config enables at least one part");
            Ok((paper.id.clone(), hybrid))
        })
        .collect::<Result<Vec<_>, RetrievalError>>()?;
    CorpusIndex::from_hybrids(docs)
}

impl CorpusIndex {
    /// Indexes arbitrary documents. All vectors must share both part
    /// dimensionalities.
    pub fn from_hybrids(mut docs: Vec<(String, HybridVector)>) -> Result<Self, RetrievalError> {
        docs.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = docs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(RetrievalError::DuplicateDocument(w[0].0.clone()));
        }
        if let Some((_, first)) = docs.first() {
            for (_, h) in &docs[1..] {
                check_dims(first, h)?;
            }
        }
        let sparse_dims = docs.first().map_or(0, |(_, h)| h.sparse_dims());
        let mut postings = vec![Vec::new(); sparse_dims];
        for (ordinal, (_, h)) in docs.iter().enumerate() {
            for &(dim, value) in h.sparse().entries() {
                postings[dim as usize].push((ordinal as u32, value));
            }
        }
        let norms = docs.iter().map(|(_, h)| h.norm()).collect();
        let (doc_ids, hybrids): (Vec<String>, Vec<HybridVector>) = docs.into_iter().unzip();
        let ordinals = doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
        Ok(CorpusIndex {
            doc_ids,
            ordinals,
            hybrids,
            norms,
            postings,
        })
    }

    pub fn len(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc_ids.is_empty()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<usize> {
        self.ordinals.get(doc_id).copied()
    }

    pub fn hybrid(&self, ordinal: usize) -> &HybridVector {
        &self.hybrids[ordinal]
    }

    pub fn norm(&self, ordinal: usize) -> f64 {
        self.norms[ordinal]
    }

    pub fn sparse_dims(&self) -> usize {
        self.postings.len()
    }

    pub fn dense_dims(&self) -> usize {
        self.hybrids.first().map_or(0, HybridVector::dense_dims)
    }

    /// Postings for one concept dimension: `(doc ordinal, value)`.
    pub fn postings(&self, dim: usize) -> &[(u32, f64)] {
        &self.postings[dim]
    }

    fn query_ordinal(&self, query_id: &str, k: usize) -> Result<usize, RetrievalError> {
        if k == 0 {
            return Err(RetrievalError::ZeroK);
        }
        self.ordinal(query_id)
            .ok_or_else(|| RetrievalError::UnknownQuery(query_id.to_string()))
    }

    /// Top-k `(doc ordinal, score)` for the document at `query`, scoring the
    /// concept part through postings and the embedding part by a full scan.
    pub fn top_k_ordinals(&self, query: usize, k: usize) -> Vec<(usize, f64)> {
        let q = &self.hybrids[query];
        let mut sparse_dot = vec![0.0f64; self.len()];
        for &(dim, qv) in q.sparse().entries() {
            for &(doc, dv) in &self.postings[dim as usize] {
                sparse_dot[doc as usize] += qv * dv;
            }
        }
        let q_norm = self.norms[query];
        let scored = (0..self.len()).filter(|&d| d != query).map(|d| {
            let dot = sparse_dot[d] + q.dense().dot(self.hybrids[d].dense());
            (d, normalize(dot, q_norm, self.norms[d]))
        });
        select_top_k(scored, k)
    }

    /// Exhaustive reference scoring: `cosine` against every other document.
    pub fn top_k_ordinals_bruteforce(&self, query: usize, k: usize) -> Vec<(usize, f64)> {
        let q = &self.hybrids[query];
        let scored = (0..self.len()).filter(|&d| d != query).map(|d| {
            let score = cosine(q, &self.hybrids[d]).expect("index dims are uniform");
            (d, score)
        });
        select_top_k(scored, k)
    }

    pub fn rank_all(&self, query_id: &str, k: usize) -> Result<RankedList, RetrievalError> {
        let q = self.query_ordinal(query_id, k)?;
        Ok(self.to_ranked(query_id, k, self.top_k_ordinals(q, k)))
    }

    pub fn rank_all_bruteforce(
        &self,
        query_id: &str,
        k: usize,
    ) -> Result<RankedList, RetrievalError> {
        let q = self.query_ordinal(query_id, k)?;
        Ok(self.to_ranked(query_id, k, self.top_k_ordinals_bruteforce(q, k)))
    }

    fn to_ranked(&self, query_id: &str, k: usize, top: Vec<(usize, f64)>) -> RankedList {
        let items = top
            .into_iter()
            .map(|(d, score)| RankedItem {
                doc_id: self.doc_ids[d].clone(),
                score,
            })
            .collect();
        RankedList::new(query_id, k, items)
    }
}

/// Score descending, then ordinal (hence doc id) ascending.
fn rank_order(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

fn select_top_k(scored: impl Iterator<Item = (usize, f64)>, k: usize) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = scored.collect();
    if k < all.len() {
        all.select_nth_unstable_by(k, rank_order);
        all.truncate(k);
    }
    all.sort_unstable_by(rank_order);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg_store::{ConceptType, Domain, MentionRecord, PaperRecord, ScopingMode};
    use crate::vectorizer::{random_embeddings, DenseVector, SparseVector};

    fn toy_kg() -> KnowledgeGraph {
        let papers: Vec<_> = ["a", "b", "c", "d", "e"]
            .iter()
            .map(|id| PaperRecord::new(*id, Domain::Bio))
            .collect();
        let m = |p: &str, s: &str, t| MentionRecord {
            paper_id: p.into(),
            surface: s.into(),
            concept_type: t,
            domain: Domain::Bio,
        };
        let mentions = vec![
            m("a", "protein", ConceptType::Material),
            m("a", "pcr", ConceptType::Method),
            m("b", "protein", ConceptType::Material),
            m("b", "pcr", ConceptType::Method),
            m("c", "protein", ConceptType::Material),
            m("d", "folding", ConceptType::Process),
        ];
        KnowledgeGraph::build(ScopingMode::InDomain, papers, mentions, vec![])
            .unwrap()
            .0
    }

    #[test]
    fn dense_only_index_has_no_sparse_dims() {
        let kg = toy_kg();
        let emb = random_embeddings(kg.papers().iter().map(|p| p.id.as_str()), 4, 1).unwrap();
        let index = build_index(&kg, Some(&emb), IndexConfig::dense_only()).unwrap();
        assert_eq!(index.sparse_dims(), 0);
        assert_eq!(index.dense_dims(), 4);
    }

    #[test]
    fn norms_match_materialized_concatenation() {
        let kg = toy_kg();
        let emb = random_embeddings(kg.papers().iter().map(|p| p.id.as_str()), 3, 2).unwrap();
        let index = build_index(&kg, Some(&emb), IndexConfig::hybrid(TypeFilter::all())).unwrap();
        assert_eq!(index.len(), 5);
        for (i, paper) in kg.papers().iter().enumerate() {
            // Naive: build the concatenation by hand and take its length.
            let mut full = vec![0.0; kg.concept_count()];
            for c in kg.paper_concepts(i) {
                full[c.index()] = 1.0;
            }
            full.extend_from_slice(emb.get(&paper.id).unwrap().components());
            let naive = full.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((index.norm(i) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn postings_cover_exactly_the_nonzeros() {
        let kg = toy_kg();
        let index = build_index(&kg, None, IndexConfig::concepts_only(TypeFilter::all())).unwrap();
        let postings: usize = (0..index.sparse_dims())
            .map(|d| index.postings(d).len())
            .sum();
        assert_eq!(postings, kg.link_count());
        for d in 0..index.sparse_dims() {
            for &(doc, _) in index.postings(d) {
                assert!(kg
                    .paper_concepts(doc as usize)
                    .iter()
                    .any(|c| c.index() == d));
            }
        }
    }

    #[test]
    fn missing_embedding_is_a_hard_error() {
        let kg = toy_kg();
        let emb = random_embeddings(["a", "b", "c", "d"], 3, 2).unwrap();
        assert_eq!(
            build_index(&kg, Some(&emb), IndexConfig::dense_only()).unwrap_err(),
            RetrievalError::MissingEmbedding("e".into())
        );
        assert_eq!(
            build_index(&kg, None, IndexConfig::dense_only()).unwrap_err(),
            RetrievalError::NoEmbeddings
        );
        let none = IndexConfig {
            use_concepts: false,
            type_filter: TypeFilter::all(),
            use_dense: false,
        };
        assert_eq!(
            build_index(&kg, None, none).unwrap_err(),
            RetrievalError::EmptyConfig
        );
    }

    #[test]
    fn twin_ranks_first_and_query_is_excluded() {
        let kg = toy_kg();
        let index = build_index(&kg, None, IndexConfig::concepts_only(TypeFilter::all())).unwrap();
        let list = index.rank_all("a", 10).unwrap();
        assert_eq!(list.items[0].doc_id, "b");
        assert!((list.items[0].score - 1.0).abs() < 1e-12);
        assert_eq!(list.len(), 4);
        assert!(list.doc_ids().all(|d| d != "a"));
        // c and d/e: c shares one concept, d and e tie at 0 and sort by id.
        let ids: Vec<&str> = list.doc_ids().collect();
        assert_eq!(ids, ["b", "c", "d", "e"]);
        assert_eq!(list, index.rank_all_bruteforce("a", 10).unwrap());
    }

    #[test]
    fn small_corpora() {
        let one =
            |v: f64| hybrid_vector(None, Some(DenseVector::new(vec![v, 1.0]).unwrap())).unwrap();
        let two = CorpusIndex::from_hybrids(vec![("x".into(), one(1.0)), ("y".into(), one(2.0))])
            .unwrap();
        assert_eq!(two.rank_all("x", 1).unwrap().len(), 1);
        assert_eq!(two.rank_all("x", 100).unwrap().len(), 1);

        let single = CorpusIndex::from_hybrids(vec![("x".into(), one(1.0))]).unwrap();
        assert!(single.rank_all("x", 5).unwrap().is_empty());
        assert!(single.rank_all_bruteforce("x", 5).unwrap().is_empty());

        assert_eq!(
            two.rank_all("zz", 1).unwrap_err(),
            RetrievalError::UnknownQuery("zz".into())
        );
        assert_eq!(two.rank_all("x", 0).unwrap_err(), RetrievalError::ZeroK);
    }

    #[test]
    fn from_hybrids_validates() {
        let s = |dims| hybrid_vector(Some(SparseVector::zero(dims)), None).unwrap();
        assert!(matches!(
            CorpusIndex::from_hybrids(vec![("a".into(), s(3)), ("b".into(), s(4))]),
            Err(RetrievalError::DimensionMismatch { .. })
        ));
        assert_eq!(
            CorpusIndex::from_hybrids(vec![("a".into(), s(3)), ("a".into(), s(3))]).unwrap_err(),
            RetrievalError::DuplicateDocument("a".into())
        );
    }
}
