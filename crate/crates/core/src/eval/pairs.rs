use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;
use crate::kg_store::KnowledgeGraph;
use crate::retrieval::cosine;
use crate::vectorizer::{concept_vector_at, hybrid_vector, HybridVector, TypeFilter};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Population {
    Citing,
    Random,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Population::Citing => "citing",
            Population::Random => "random",
        })
    }
}

/// Box-plot summary of a similarity distribution. Quartiles use linear
/// interpolation between order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub population: Population,
    pub count: usize,
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

impl PairStats {
    pub fn from_values(population: Population, mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_unstable_by(f64::total_cmp);
        let n = values.len();
        Some(PairStats {
            population,
            count: n,
            mean: values.iter().sum::<f64>() / n as f64,
            q1: quantile(&values, 0.25),
            median: quantile(&values, 0.5),
            q3: quantile(&values, 0.75),
            min: values[0],
            max: values[n - 1],
        })
    }

    pub const TSV_HEADER: &'static str = "population\tcount\tmean\tq1\tmedian\tq3\tmin\tmax";

    pub fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            self.population,
            self.count,
            self.mean,
            self.q1,
            self.median,
            self.q3,
            self.min,
            self.max
        )
    }
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Concept-vector cosine for every citation edge, against the same number
/// of seeded random ordered pairs.
///
/// A random pair keeps the citing paper of the corresponding edge and
/// draws its partner uniformly, redrawing self-pairs and real citations.
/// When a citing paper cites everyone else, both endpoints are drawn.
pub fn pair_similarity_stats(
    kg: &KnowledgeGraph,
    seed: u64,
) -> Result<(PairStats, PairStats), EvalError> {
    let edges = kg.citation_edges();
    if edges.is_empty() {
        return Err(EvalError::NoCitations);
    }
    let n = kg.paper_count();
    if edges.len() >= n * (n - 1) {
        return Err(EvalError::NoRandomPairs);
    }
    let vectors: Vec<HybridVector> = (0..n)
        .map(|p| {
            hybrid_vector(Some(concept_vector_at(kg, p, TypeFilter::all())), None)
                .expect("concept part present")
        })
        .collect();
    let sim = |a: usize, b: usize| cosine(&vectors[a], &vectors[b]).expect("uniform dims");

    let citing: Vec<f64> = edges.iter().map(|&(a, b)| sim(a, b)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let valid = |a: usize, b: usize| a != b && !kg.has_citation(a, b);
    let mut random = Vec::with_capacity(edges.len());
    for &(citing_paper, _) in edges {
        let first = if kg.cited_by(citing_paper).len() < n - 1 {
            Some(citing_paper)
        } else {
            None
        };
        let pair = loop {
            let a = first.unwrap_or_else(|| rng.random_range(0..n));
            let b = rng.random_range(0..n);
            if valid(a, b) {
                break (a, b);
            }
        };
        random.push(sim(pair.0, pair.1));
    }

    Ok((
        PairStats::from_values(Population::Citing, citing).expect("non-empty"),
        PairStats::from_values(Population::Random, random).expect("non-empty"),
    ))
}
