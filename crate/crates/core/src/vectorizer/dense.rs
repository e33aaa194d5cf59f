use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::VectorError;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    components: Vec<f64>,
}

impl DenseVector {
    pub fn new(components: Vec<f64>) -> Result<Self, VectorError> {
        if components.is_empty() {
            return Err(VectorError::EmptyDense);
        }
        if let Some(pos) = components.iter().position(|x| !x.is_finite()) {
            return Err(VectorError::NonFinite(pos));
        }
        Ok(DenseVector { components })
    }

    /// Zero-dimensional placeholder for an absent embedding part.
    pub(crate) fn empty() -> Self {
        DenseVector {
            components: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Sequential dot product; callers guarantee equal lengths.
    pub fn dot(&self, other: &DenseVector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = 0.0;
        for (a, b) in self.components.iter().zip(&other.components) {
            acc += a * b;
        }
        acc
    }

    pub fn scaled(&self, factor: f64) -> DenseVector {
        DenseVector {
            components: self.components.iter().map(|x| x * factor).collect(),
        }
    }
}

/// Document embeddings keyed by paper id, all of one dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, DenseVector>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self, VectorError> {
        if dim == 0 {
            return Err(VectorError::EmptyDense);
        }
        Ok(EmbeddingTable {
            dim,
            vectors: BTreeMap::new(),
        })
    }

    pub fn insert(&mut self, paper_id: String, vector: DenseVector) -> Result<(), VectorError> {
        if vector.dim() != self.dim {
            return Err(VectorError::DimensionMismatch {
                expected: self.dim,
                found: vector.dim(),
            });
        }
        if self.vectors.contains_key(&paper_id) {
            return Err(VectorError::DuplicateId(paper_id));
        }
        self.vectors.insert(paper_id, vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, paper_id: &str) -> Option<&DenseVector> {
        self.vectors.get(paper_id)
    }

    /// Entries in ascending paper-id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &DenseVector)> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Writes the text format read by [`load_embeddings`]. Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn write_text<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writeln!(writer, "{} {}", self.len(), self.dim)?;
        for (id, v) in self.iter() {
            write!(writer, "{id}")?;
            for x in v.components() {
                write!(writer, " {x}")?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("expected {expected} vectors, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads an embedding export: a `count dim` header line, then one line per
/// paper holding its id followed by `dim` space-separated floats.
pub fn load_embeddings<R: BufRead>(reader: R) -> Result<EmbeddingTable, LoadError> {
    let mut lines = reader.lines().enumerate();
    let (count, dim) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(LoadError::Line {
                line: 1,
                message: "missing `count dim` header".into(),
            });
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: &str| LoadError::Line {
            line: i + 1,
            message: message.to_string(),
        };
        let mut parts = line.split_whitespace();
        let count = parts.next().and_then(|s| s.parse::<usize>().ok());
        let dim = parts.next().and_then(|s| s.parse::<usize>().ok());
        match (count, dim, parts.next()) {
            (Some(_), Some(0), None) => return Err(err("dimension must be positive")),
            (Some(c), Some(d), None) => break (c, d),
            _ => return Err(err("malformed `count dim` header")),
        }
    };

    let mut table = EmbeddingTable::new(dim).expect("dim checked above");
    for (i, line) in lines {
        let line = line?;
        let line_no = i + 1;
        let err = |message: String| LoadError::Line {
            line: line_no,
            message,
        };
        let mut parts = line.split_whitespace();
        let Some(id) = parts.next() else { continue };
        let values = parts
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| err(format!("invalid number {s:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if values.len() != dim {
            return Err(err(format!(
                "expected {dim} values for {id}, found {}",
                values.len()
            )));
        }
        let vector = DenseVector::new(values).map_err(|e| err(format!("{id}: {e}")))?;
        table
            .insert(id.to_string(), vector)
            .map_err(|e| err(e.to_string()))?;
    }
    if table.len() != count {
        return Err(LoadError::Count {
            expected: count,
            found: table.len(),
        });
    }
    Ok(table)
}

fn paper_rng(seed: u64, paper_id: &str) -> ChaCha8Rng {
    let digest = Sha256::new()
        .chain_update(seed.to_le_bytes())
        .chain_update(paper_id.as_bytes())
        .finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Standard-normal embeddings, one per paper. Each paper's generator is
/// keyed by `(seed, paper_id)`, so a vector does not depend on which other
/// papers are in the table.
pub fn random_embeddings<'a>(
    paper_ids: impl IntoIterator<Item = &'a str>,
    dim: usize,
    seed: u64,
) -> Result<EmbeddingTable, VectorError> {
    let mut table = EmbeddingTable::new(dim)?;
    for id in paper_ids {
        let mut rng = paper_rng(seed, id);
        let components: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        table.insert(id.to_string(), DenseVector::new(components)?)?;
    }
    Ok(table)
}
