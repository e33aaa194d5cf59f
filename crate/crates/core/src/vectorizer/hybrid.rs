use super::{DenseVector, SparseVector, VectorError};

/// Concatenation `[concept part, embedding part]` kept as two pieces.
///
/// Either piece may be zero-dimensional, which gives the concept-only and
/// embedding-only configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridVector {
    sparse: SparseVector,
    dense: DenseVector,
}

pub fn hybrid_vector(
    sparse: Option<SparseVector>,
    dense: Option<DenseVector>,
) -> Result<HybridVector, VectorError> {
    if sparse.is_none() && dense.is_none() {
        return Err(VectorError::BothPartsAbsent);
    }
    Ok(HybridVector {
        sparse: sparse.unwrap_or_else(|| SparseVector::zero(0)),
        dense: dense.unwrap_or_else(DenseVector::empty),
    })
}

impl HybridVector {
    pub fn sparse(&self) -> &SparseVector {
        &self.sparse
    }

    pub fn dense(&self) -> &DenseVector {
        &self.dense
    }

    pub fn sparse_dims(&self) -> usize {
        self.sparse.dims()
    }

    pub fn dense_dims(&self) -> usize {
        self.dense.dim()
    }

    pub fn dims(&self) -> usize {
        self.sparse_dims() + self.dense_dims()
    }

    pub fn norm_sq(&self) -> f64 {
        self.sparse.norm_sq() + self.dense.norm_sq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> HybridVector {
        HybridVector {
            sparse: self.sparse.scaled(factor),
            dense: self.dense.scaled(factor),
        }
    }

    /// The explicit concatenated vector, for inspection and testing.
    pub fn materialize(&self) -> Vec<f64> {
        let mut out = self.sparse.to_dense();
        out.extend_from_slice(self.dense.components());
        out
    }
}
