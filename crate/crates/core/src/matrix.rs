//! The model matrix whose rows are the vectorized one-hot encodings of a vertex set.

use std::sync::Arc;

use crate::error::Result;
use crate::kmer::{common_instance, dedup_kmers, HammingInstance, Kmer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelMatrix {
    instance: Arc<HammingInstance>,
    rows: Vec<Vec<u8>>,
    source: Vec<Kmer>,
}

impl ModelMatrix {
    /// Row `i` is `vec(V_i)` for the i-th distinct k-mer of `set`.
    pub fn build(set: &[Kmer]) -> Result<Self> {
        let instance = common_instance(set)?;
        let source = dedup_kmers(set);
        let rows = source.iter().map(Kmer::one_hot_vec).collect();
        Ok(ModelMatrix {
            instance,
            rows,
            source,
        })
    }

    pub fn instance(&self) -> &Arc<HammingInstance> {
        &self.instance
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn source(&self) -> &[Kmer] {
        &self.source
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.instance.dimension()
    }

    /// `A z` for an integer vector `z`.
    pub fn apply(&self, z: &[i64]) -> Vec<i64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(z).map(|(&r, &x)| r as i64 * x).sum())
            .collect()
    }
}

pub fn build_a(set: &[Kmer]) -> Result<ModelMatrix> {
    ModelMatrix::build(set)
}
