use super::VectorError;

/// Sparse vector stored as `(index, value)` pairs with strictly increasing
/// indices and nonzero values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    dims: usize,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn new(dims: usize, entries: Vec<(u32, f64)>) -> Result<Self, VectorError> {
        for (pos, &(index, value)) in entries.iter().enumerate() {
            if index as usize >= dims {
                return Err(VectorError::InvalidSparse(format!(
                    "index {index} out of range for {dims} dims"
                )));
            }
            if pos > 0 && entries[pos - 1].0 >= index {
                return Err(VectorError::InvalidSparse(format!(
                    "indices not strictly increasing at position {pos}"
                )));
            }
            if !value.is_finite() {
                return Err(VectorError::NonFinite(pos));
            }
            if value == 0.0 {
                return Err(VectorError::InvalidSparse(format!(
                    "explicit zero at index {index}"
                )));
            }
        }
        Ok(SparseVector { dims, entries })
    }

    pub(crate) fn from_sorted_unchecked(dims: usize, entries: Vec<(u32, f64)>) -> Self {
        debug_assert!(SparseVector::new(dims, entries.clone()).is_ok());
        SparseVector { dims, entries }
    }

    pub fn zero(dims: usize) -> Self {
        SparseVector {
            dims,
            entries: Vec::new(),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    /// Dot product by merging the two index lists; products are summed in
    /// ascending index order.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            dims: self.dims,
            entries: self.entries.iter().map(|&(i, v)| (i, v * factor)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dims];
        for &(i, v) in &self.entries {
            out[i as usize] = v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SparseVector::new(5, vec![(0, 1.0), (4, 2.0)]).is_ok());
        assert!(SparseVector::new(5, vec![(5, 1.0)]).is_err());
        assert!(SparseVector::new(5, vec![(2, 1.0), (2, 1.0)]).is_err());
        assert!(SparseVector::new(5, vec![(3, 1.0), (1, 1.0)]).is_err());
        assert!(SparseVector::new(5, vec![(1, 0.0)]).is_err());
        assert_eq!(
            SparseVector::new(5, vec![(1, f64::NAN)]),
            Err(VectorError::NonFinite(0))
        );
    }

    #[test]
    fn merge_dot() {
        let a = SparseVector::new(6, vec![(0, 1.0), (2, 1.0)]).unwrap();
        let b = SparseVector::new(6, vec![(2, 1.0), (5, 1.0)]).unwrap();
        assert_eq!(a.dot(&b), 1.0);
        assert_eq!(a.norm_sq(), 2.0);
        assert_eq!(a.to_dense(), vec![1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }
}
