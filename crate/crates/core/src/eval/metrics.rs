use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{EvalError, QuerySet};
use crate::retrieval::{CorpusIndex, RankedList, RetrievalError};

/// Fraction of the top `k` that is relevant. The divisor stays `k` even
/// when the list is shorter.
pub fn precision_at_k(
    ranked: &RankedList,
    relevant: &BTreeSet<String>,
    k: usize,
) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    let hits = ranked
        .doc_ids()
        .take(k)
        .filter(|d| relevant.contains(*d))
        .count();
    Ok(hits as f64 / k as f64)
}

/// Average precision over the first `k` positions, normalized by the total
/// number of relevant documents (not by `min(k, |relevant|)`).
pub fn average_precision_at_k(
    ranked: &RankedList,
    relevant: &BTreeSet<String>,
    k: usize,
) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::ZeroK);
    }
    if relevant.is_empty() {
        return Err(EvalError::EmptyRelevant(ranked.query_id.clone()));
    }
    let flags = ranked.doc_ids().map(|d| relevant.contains(d));
    Ok(average_precision_at_ks(flags, relevant.len(), &[k])[0])
}

/// AP at several cutoffs from one relevance sequence. `ks` must be
/// ascending.
pub(crate) fn average_precision_at_ks(
    flags: impl Iterator<Item = bool>,
    total_relevant: usize,
    ks: &[usize],
) -> Vec<f64> {
    debug_assert!(ks.windows(2).all(|w| w[0] <= w[1]));
    let max_k = ks.last().copied().unwrap_or(0);
    let mut out = Vec::with_capacity(ks.len());
    let mut next = 0;
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (pos, rel) in flags.take(max_k).enumerate() {
        let rank = pos + 1;
        if rel {
            hits += 1;
            sum += hits as f64 / rank as f64;
        }
        while next < ks.len() && ks[next] == rank {
            out.push(sum / total_relevant as f64);
            next += 1;
        }
    }
    // Cutoffs beyond the end of a short list see the final sum.
    while out.len() < ks.len() {
        out.push(sum / total_relevant as f64);
    }
    out
}

/// Mean that does not depend on the order of `values`: summation runs over
/// the sorted values.
pub(crate) fn order_free_mean(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted.iter().sum::<f64>() / sorted.len() as f64
}

pub(crate) fn validate_ks(ks: &[usize]) -> Result<(), EvalError> {
    if ks.is_empty() || ks[0] == 0 || ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::InvalidKValues(ks.to_vec()));
    }
    Ok(())
}

/// Per-query AP at each cutoff in `ks` (ascending), in query order.
pub fn per_query_average_precision(
    queryset: &QuerySet,
    index: &CorpusIndex,
    ks: &[usize],
) -> Result<Vec<Vec<f64>>, EvalError> {
    validate_ks(ks)?;
    let max_k = *ks.last().expect("validated non-empty");
    queryset
        .queries
        .par_iter()
        .map(|q| {
            if q.relevant.is_empty() {
                return Err(EvalError::EmptyRelevant(q.id.clone()));
            }
            let ordinal = index
                .ordinal(&q.id)
                .ok_or_else(|| RetrievalError::UnknownQuery(q.id.clone()))?;
            let relevant: BTreeSet<usize> =
                q.relevant.iter().filter_map(|r| index.ordinal(r)).collect();
            let top = index.top_k_ordinals(ordinal, max_k);
            let flags = top.iter().map(|(d, _)| relevant.contains(d));
            Ok(average_precision_at_ks(flags, q.relevant.len(), ks))
        })
        .collect()
}

/// MAP at each cutoff in `ks`, ranking every query once at the deepest
/// cutoff.
pub fn map_at_ks(
    queryset: &QuerySet,
    index: &CorpusIndex,
    ks: &[usize],
) -> Result<Vec<f64>, EvalError> {
    if queryset.is_empty() {
        return Err(EvalError::EmptyQuerySet);
    }
    let per_query = per_query_average_precision(queryset, index, ks)?;
    Ok((0..ks.len())
        .map(|i| {
            let column: Vec<f64> = per_query.iter().map(|aps| aps[i]).collect();
            order_free_mean(&column)
        })
        .collect())
}

pub fn map_at_k(queryset: &QuerySet, index: &CorpusIndex, k: usize) -> Result<f64, EvalError> {
    Ok(map_at_ks(queryset, index, &[k])?[0])
}
