//! Embeddings, a flat vector index and exact cosine top-k.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::graph::{node_text, KnowledgeGraph};
use crate::text::fnv1a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub values: Vec<f64>,
}

impl Embedding {
    pub fn new(values: Vec<f64>) -> Self {
        Embedding { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.values.iter().map(|v| v * v).sum())
    }

    fn check_finite(&self) -> Result<(), EmbedError> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(EmbedError::NonFinite)
        }
    }

    /// Unit-length copy; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Embedding> {
        let n = self.norm();
        if n == 0.0 {
            return None;
        }
        Some(Embedding {
            values: self.values.iter().map(|v| v / n).collect(),
        })
    }
}

impl From<Vec<f64>> for Embedding {
    fn from(values: Vec<f64>) -> Self {
        Embedding { values }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("vector has a non-finite entry")]
    NonFinite,
    #[error("index is empty")]
    EmptyIndex,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("embedding batch {batch} failed: {message}")]
    Provider { batch: usize, message: String },
    #[error("provider returned {actual} vectors for {expected} texts")]
    CountMismatch { expected: usize, actual: usize },
}

/// Error reported by an [`EmbeddingProvider`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ProviderError(pub String);

pub trait EmbeddingProvider: Send + Sync {
    fn dim(&self) -> usize;
    /// One vector per input text, in input order.
    fn embed(&self, texts: &[&str]) -> Result<Vec<Embedding>, ProviderError>;
}

impl<T: EmbeddingProvider + ?Sized> EmbeddingProvider for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed(&self, texts: &[&str]) -> Result<Vec<Embedding>, ProviderError> {
        (**self).embed(texts)
    }
}

impl<T: EmbeddingProvider + ?Sized> EmbeddingProvider for alloc::boxed::Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn embed(&self, texts: &[&str]) -> Result<Vec<Embedding>, ProviderError> {
        (**self).embed(texts)
    }
}

/// Offline provider: lowercase alphanumeric tokens hashed (FNV-1a) into
/// `dim` buckets, counted, then L2-normalized. Text without tokens maps to
/// the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashedEmbedder {
    dim: usize,
}

impl HashedEmbedder {
    pub const DEFAULT_DIM: usize = 256;

    pub fn new() -> Self {
        HashedEmbedder {
            dim: Self::DEFAULT_DIM,
        }
    }

    pub fn with_dim(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        HashedEmbedder { dim }
    }

    pub fn embed_one(&self, text: &str) -> Embedding {
        let mut values = vec![0.0; self.dim];
        for token in text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
        {
            let token = token.to_lowercase();
            values[(fnv1a(token.as_bytes()) % self.dim as u64) as usize] += 1.0;
        }
        let e = Embedding { values };
        e.normalized().unwrap_or(e)
    }
}

impl Default for HashedEmbedder {
    fn default() -> Self {
        Self::new()
    }
}

impl EmbeddingProvider for HashedEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<Embedding>, ProviderError> {
        Ok(texts.iter().map(|t| self.embed_one(t)).collect())
    }
}

pub fn cosine_similarity(a: &Embedding, b: &Embedding) -> Result<f64, EmbedError> {
    if a.dim() != b.dim() {
        return Err(EmbedError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    a.check_finite()?;
    b.check_finite()?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(EmbedError::ZeroVector);
    }
    let dot: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredNode {
    pub id: String,
    pub score: f64,
    /// 1 is best.
    pub rank: usize,
}

/// Exhaustive-search index. Vectors are stored unit-length, so scoring is a
/// dot product. A zero vector is kept as is and scores 0 against any query.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    dim: usize,
    ids: Vec<String>,
    texts: Vec<String>,
    vectors: Vec<Vec<f64>>,
    positions: BTreeMap<String, usize>,
}

impl VectorIndex {
    pub fn new(dim: usize) -> Self {
        VectorIndex {
            dim,
            ids: Vec::new(),
            texts: Vec::new(),
            vectors: Vec::new(),
            positions: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn insert(
        &mut self,
        id: impl Into<String>,
        text: impl Into<String>,
        vector: Embedding,
    ) -> Result<(), EmbedError> {
        let id = id.into();
        if vector.dim() != self.dim {
            return Err(EmbedError::DimensionMismatch {
                expected: self.dim,
                actual: vector.dim(),
            });
        }
        vector.check_finite()?;
        if self.positions.contains_key(&id) {
            return Err(EmbedError::DuplicateId(id));
        }
        let values = vector.normalized().unwrap_or(vector).values;
        self.positions.insert(id.clone(), self.ids.len());
        self.ids.push(id);
        self.texts.push(text.into());
        self.vectors.push(values);
        Ok(())
    }

    /// Rebuilds an index from [`VectorIndex::entries`] output. Vectors are
    /// stored exactly as given, so a saved index reloads bit for bit.
    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (String, String, Vec<f64>)>,
    ) -> Result<Self, EmbedError> {
        let mut index = VectorIndex::new(dim);
        for (id, text, values) in entries {
            if values.len() != dim {
                return Err(EmbedError::DimensionMismatch {
                    expected: dim,
                    actual: values.len(),
                });
            }
            if !values.iter().all(|v| v.is_finite()) {
                return Err(EmbedError::NonFinite);
            }
            if index.positions.contains_key(&id) {
                return Err(EmbedError::DuplicateId(id));
            }
            index.positions.insert(id.clone(), index.ids.len());
            index.ids.push(id);
            index.texts.push(text);
            index.vectors.push(values);
        }
        Ok(index)
    }

    pub fn text(&self, id: &str) -> Option<&str> {
        self.positions.get(id).map(|&i| self.texts[i].as_str())
    }

    pub fn vector(&self, id: &str) -> Option<&[f64]> {
        self.positions.get(id).map(|&i| self.vectors[i].as_slice())
    }

    /// `(id, text, unit vector)` in insertion order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, &[f64])> {
        self.ids
            .iter()
            .zip(&self.texts)
            .zip(&self.vectors)
            .map(|((id, text), v)| (id.as_str(), text.as_str(), v.as_slice()))
    }
}

/// Embeds `node_text` of every node, `batch_size` texts per provider call.
pub fn build_index(
    kg: &KnowledgeGraph,
    provider: &dyn EmbeddingProvider,
    batch_size: usize,
) -> Result<VectorIndex, EmbedError> {
    let items: Vec<(String, String)> = kg
        .nodes
        .iter()
        .map(|n| (n.id.clone(), node_text(n)))
        .collect();
    index_texts(&items, provider, batch_size)
}

/// Embeds arbitrary `(id, text)` pairs into a fresh index.
pub fn index_texts(
    items: &[(String, String)],
    provider: &dyn EmbeddingProvider,
    batch_size: usize,
) -> Result<VectorIndex, EmbedError> {
    let mut index = VectorIndex::new(provider.dim());
    for (batch, group) in items.chunks(batch_size.max(1)).enumerate() {
        let texts: Vec<&str> = group.iter().map(|(_, t)| t.as_str()).collect();
        let vectors = provider.embed(&texts).map_err(|e| EmbedError::Provider {
            batch,
            message: e.0,
        })?;
        if vectors.len() != texts.len() {
            return Err(EmbedError::CountMismatch {
                expected: texts.len(),
                actual: vectors.len(),
            });
        }
        for ((id, text), v) in group.iter().zip(vectors) {
            index.insert(id.clone(), text.clone(), v)?;
        }
    }
    Ok(index)
}

/// Embeds a single query string.
pub fn embed_query(provider: &dyn EmbeddingProvider, query: &str) -> Result<Embedding, EmbedError> {
    let mut v = provider.embed(&[query]).map_err(|e| EmbedError::Provider {
        batch: 0,
        message: e.0,
    })?;
    if v.len() != 1 {
        return Err(EmbedError::CountMismatch {
            expected: 1,
            actual: v.len(),
        });
    }
    Ok(v.remove(0))
}

/// The `k` best entries by cosine, score descending then id ascending.
/// A zero query scores 0 everywhere.
pub fn top_k(
    index: &VectorIndex,
    query: &Embedding,
    k: usize,
) -> Result<Vec<ScoredNode>, EmbedError> {
    if k == 0 {
        return Err(EmbedError::InvalidK);
    }
    if index.is_empty() {
        return Err(EmbedError::EmptyIndex);
    }
    if query.dim() != index.dim {
        return Err(EmbedError::DimensionMismatch {
            expected: index.dim,
            actual: query.dim(),
        });
    }
    query.check_finite()?;
    let q = query.normalized().unwrap_or_else(|| query.clone());
    let mut scored: Vec<(f64, &str)> = index
        .ids
        .iter()
        .zip(&index.vectors)
        .map(|(id, v)| {
            let dot: f64 = v.iter().zip(&q.values).map(|(x, y)| x * y).sum();
            // `+ 0.0` turns -0.0 into 0.0 so that equal scores tie under total_cmp.
            (dot.clamp(-1.0, 1.0) + 0.0, id.as_str())
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    scored.truncate(k);
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(i, (score, id))| ScoredNode {
            id: id.to_string(),
            score,
            rank: i + 1,
        })
        .collect())
}

impl core::fmt::Display for ScoredNode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&format!("{}. {} ({:.4})", self.rank, self.id, self.score))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EntityNode;

    #[test]
    fn cosine_examples() {
        let v = Embedding::new(vec![0.3, -1.2, 4.0]);
        assert!((cosine_similarity(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        let x = Embedding::new(vec![1.0, 0.0]);
        let y = Embedding::new(vec![0.0, 1.0]);
        assert_eq!(cosine_similarity(&x, &y).unwrap(), 0.0);
        let d = Embedding::new(vec![1.0, 1.0]);
        assert!(
            (cosine_similarity(&d, &x).unwrap() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12
        );
        assert_eq!(
            cosine_similarity(&x, &v),
            Err(EmbedError::DimensionMismatch {
                expected: 2,
                actual: 3
            })
        );
        assert_eq!(
            cosine_similarity(&x, &Embedding::new(vec![0.0, 0.0])),
            Err(EmbedError::ZeroVector)
        );
    }

    #[test]
    fn hashed_embedder_is_deterministic_and_unit() {
        let e = HashedEmbedder::new();
        let a = e.embed_one("Granter.ai writes grants");
        assert_eq!(a, e.embed_one("granter AI writes GRANTS"));
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert_eq!(a.dim(), 256);
        assert_eq!(e.embed_one("...").norm(), 0.0);
    }

    #[test]
    fn index_and_top_k() {
        let mut kg = KnowledgeGraph::new();
        for (id, name) in [
            ("a", "Granter.ai"),
            ("b", "Horizon Europe"),
            ("c", "Ana Silva"),
        ] {
            kg.add_node(EntityNode::entity(id, name, "Thing")).unwrap();
        }
        let e = HashedEmbedder::new();
        assert!(build_index(&KnowledgeGraph::new(), &e, 2)
            .unwrap()
            .is_empty());
        let index = build_index(&kg, &e, 2).unwrap();
        assert_eq!(index.len(), 3);
        assert_eq!(build_index(&kg, &e, 1).unwrap(), index);

        let q = embed_query(&e, index.text("b").unwrap()).unwrap();
        let hits = top_k(&index, &q, 10).unwrap();
        assert_eq!(hits.len(), 3);
        assert_eq!(hits[0].id, "b");
        assert!((hits[0].score - 1.0).abs() < 1e-12);
        assert_eq!(
            hits.iter().map(|h| h.rank).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        assert_eq!(top_k(&index, &q, 0), Err(EmbedError::InvalidK));
        assert_eq!(
            top_k(&VectorIndex::new(256), &q, 1),
            Err(EmbedError::EmptyIndex)
        );
    }

    #[test]
    fn ties_break_by_id() {
        let mut index = VectorIndex::new(2);
        index
            .insert("z", "", Embedding::new(vec![1.0, 0.0]))
            .unwrap();
        index
            .insert("a", "", Embedding::new(vec![2.0, 0.0]))
            .unwrap();
        index
            .insert("m", "", Embedding::new(vec![0.0, 0.0]))
            .unwrap();
        let hits = top_k(&index, &Embedding::new(vec![3.0, 0.0]), 3).unwrap();
        let ids: Vec<_> = hits.iter().map(|h| h.id.as_str()).collect();
        assert_eq!(ids, vec!["a", "z", "m"]);
        assert_eq!(hits[2].score, 0.0);
        assert_eq!(
            index.insert("a", "", Embedding::new(vec![1.0, 0.0])),
            Err(EmbedError::DuplicateId("a".into()))
        );
    }

    struct Failing;
    impl EmbeddingProvider for Failing {
        fn dim(&self) -> usize {
            4
        }
        fn embed(&self, texts: &[&str]) -> Result<Vec<Embedding>, ProviderError> {
            if texts.iter().any(|t| t.contains("boom")) {
                Err(ProviderError("503".into()))
            } else {
                Ok(texts
                    .iter()
                    .map(|_| Embedding::new(vec![1.0, 0.0, 0.0, 0.0]))
                    .collect())
            }
        }
    }

    #[test]
    fn provider_failure_names_batch() {
        let items: Vec<(String, String)> = ["ok", "ok", "ok", "boom"]
            .iter()
            .enumerate()
            .map(|(i, t)| (format!("n{i}"), t.to_string()))
            .collect();
        assert_eq!(
            index_texts(&items, &Failing, 2),
            Err(EmbedError::Provider {
                batch: 1,
                message: "503".into()
            })
        );
    }
}
