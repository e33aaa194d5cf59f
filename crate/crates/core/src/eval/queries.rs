use std::collections::BTreeSet;

use crate::kg_store::KnowledgeGraph;

pub const DEFAULT_MIN_CITATIONS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    /// Papers the query cites inside the corpus.
    pub relevant: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QuerySet {
    pub queries: Vec<Query>,
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn relevant_link_count(&self) -> usize {
        self.queries.iter().map(|q| q.relevant.len()).sum()
    }
}

/// Every paper with at least `min_citations` outgoing in-corpus citations
/// becomes a query whose relevant set is exactly what it cites. Queries are
/// in ascending id order.
pub fn select_queries(kg: &KnowledgeGraph, min_citations: usize) -> QuerySet {
    let queries = (0..kg.paper_count())
        .filter(|&p| kg.cited_by(p).len() >= min_citations.max(1))
        .map(|p| Query {
            id: kg.paper(p).id.clone(),
            relevant: kg
                .cited_by(p)
                .iter()
                .map(|&c| kg.paper(c).id.clone())
                .collect(),
        })
        .collect();
    QuerySet { queries }
}
