//! Seeded corpora with planted structure, for tests and desk-scale
//! experiments.
//!
//! Papers fall into communities. Every paper mentions its community's core
//! concepts plus an equal number of concepts drawn from a shared pool, so
//! two papers of one community share at least half of their concepts.
//! Citations only run inside a community. The dense embeddings carry a
//! separate signal: each citing paper owns a random direction that is
//! added to its own embedding and to the embeddings of everything it
//! cites, on top of isotropic noise.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kg_store::{ConceptType, Domain, MentionRecord, PaperRecord};
use crate::vectorizer::{DenseVector, EmbeddingTable};

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub papers: usize,
    pub concepts: usize,
    pub citations: usize,
    pub communities: usize,
    /// Concepts every member of a community mentions.
    pub core_concepts: usize,
    /// Concepts each paper draws from the shared pool.
    pub own_concepts: usize,
    pub dense_dim: usize,
    /// Length of the planted citation direction, in units of the noise
    /// standard deviation.
    pub dense_signal: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            papers: 500,
            concepts: 2000,
            citations: 1500,
            communities: 25,
            core_concepts: 8,
            own_concepts: 8,
            dense_dim: 64,
            dense_signal: 4.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub papers: Vec<PaperRecord>,
    pub mentions: Vec<MentionRecord>,
    pub citations: Vec<(String, String)>,
    pub embeddings: EmbeddingTable,
}

pub fn paper_id(i: usize) -> String {
    format!("P{i:06}")
}

pub fn concept_surface(j: usize) -> String {
    format!("Concept {j:05}")
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticCorpus {
    let communities = spec.communities.max(1);
    let core_pool = communities * spec.core_concepts;
    assert!(
        core_pool + spec.own_concepts <= spec.concepts,
        "concept pool too small for the requested communities"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let community = |i: usize| i % communities;
    let members: Vec<Vec<usize>> = (0..communities)
        .map(|c| (0..spec.papers).filter(|&i| community(i) == c).collect())
        .collect();
    let capacity: usize = members
        .iter()
        .map(|m| m.len() * m.len().saturating_sub(1))
        .sum();
    assert!(
        spec.citations <= capacity,
        "cannot place {} citations inside communities",
        spec.citations
    );

    let domain_of = |i: usize| Domain::ALL[community(i) % Domain::ALL.len()];
    let papers: Vec<PaperRecord> = (0..spec.papers)
        .map(|i| PaperRecord::new(paper_id(i), domain_of(i)))
        .collect();

    let shared_pool = spec.concepts - core_pool;
    let mut mentions = Vec::new();
    for i in 0..spec.papers {
        let c = community(i);
        let core = (0..spec.core_concepts).map(|j| c * spec.core_concepts + j);
        let own = sample(&mut rng, shared_pool, spec.own_concepts)
            .into_iter()
            .map(|j| core_pool + j);
        for j in core.chain(own) {
            mentions.push(MentionRecord {
                paper_id: paper_id(i),
                surface: concept_surface(j),
                concept_type: ConceptType::ALL[j % ConceptType::ALL.len()],
                domain: domain_of(i),
            });
        }
    }

    let mut edges = BTreeSet::new();
    while edges.len() < spec.citations {
        let a = rng.random_range(0..spec.papers);
        let group = &members[community(a)];
        if group.len() < 2 {
            continue;
        }
        let b = group[rng.random_range(0..group.len())];
        if a != b {
            edges.insert((a, b));
        }
    }

    let dim = spec.dense_dim;
    let mut dense: Vec<Vec<f64>> = (0..spec.papers)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    let mut citing: Vec<usize> = edges.iter().map(|&(a, _)| a).collect();
    citing.dedup();
    for a in citing {
        let raw: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let len = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let key: Vec<f64> = raw.iter().map(|x| x / len * spec.dense_signal).collect();
        let targets =
            std::iter::once(a).chain(edges.range((a, 0)..=(a, usize::MAX)).map(|&(_, b)| b));
        for t in targets {
            for (x, k) in dense[t].iter_mut().zip(&key) {
                *x += k;
            }
        }
    }
    let mut embeddings = EmbeddingTable::new(dim).expect("dense_dim must be positive");
    for (i, v) in dense.into_iter().enumerate() {
        embeddings
            .insert(paper_id(i), DenseVector::new(v).expect("finite"))
            .expect("unique ids");
    }

    let citations = edges
        .into_iter()
        .map(|(a, b)| (paper_id(a), paper_id(b)))
        .collect();

    SyntheticCorpus {
        papers,
        mentions,
        citations,
        embeddings,
    }
}
