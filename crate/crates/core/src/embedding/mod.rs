//! Word embeddings: skip-gram training, IDF-weighted text vectors, cosine.

mod io;
mod skipgram;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::text::Lexicon;
use crate::Tid;

pub use io::{read_matrix, write_matrix, write_token_sidecar, MATRIX_MAGIC, MATRIX_VERSION};
pub use skipgram::{
    pair_loss, sgd_pair, train_skipgram, SkipGramTrainer, TrainingConfig, TrainingOutcome,
};

/// Dense input-side vector per TID.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    vectors: BTreeMap<Tid, Vec<f32>>,
}

impl EmbeddingMatrix {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            vectors: BTreeMap::new(),
        }
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

    pub fn get(&self, tid: Tid) -> Option<&[f32]> {
        self.vectors.get(&tid).map(Vec::as_slice)
    }

    pub fn contains(&self, tid: Tid) -> bool {
        self.vectors.contains_key(&tid)
    }

    /// Iterates in ascending TID order.
    pub fn iter(&self) -> impl Iterator<Item = (Tid, &[f32])> + '_ {
        self.vectors.iter().map(|(t, v)| (*t, v.as_slice()))
    }

    pub fn insert(&mut self, tid: Tid, vector: Vec<f32>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "vector for tid {tid} has {} components, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("vector for tid {tid} is not finite")));
        }
        self.vectors.insert(tid, vector);
        Ok(())
    }
}

/// Title or query vector.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVector(Vec<f64>);

impl WeightedVector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn from_components(components: Vec<f64>) -> Self {
        Self(components)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| *x == 0.0)
    }
}

/// `ln(corpus_size / doc_freq)` for a token.
pub fn idf_weight(tid: Tid, lexicon: &Lexicon) -> Result<f64> {
    let df = lexicon.doc_freq(tid).ok_or(Error::UnknownTid(tid))?;
    if df == 0 {
        return Err(Error::InvalidInput(format!(
            "token id {tid} has no recorded documents"
        )));
    }
    Ok((f64::from(lexicon.corpus_size()) / f64::from(df)).ln())
}

/// Sum of each token's vector scaled by its IDF weight. Tokens missing from
/// the matrix or the lexicon contribute nothing.
pub fn embed_weighted(tids: &[Tid], matrix: &EmbeddingMatrix, lexicon: &Lexicon) -> WeightedVector {
    let mut acc = vec![0.0f64; matrix.dim()];
    for &tid in tids {
        let (Some(vector), Ok(weight)) = (matrix.get(tid), idf_weight(tid, lexicon)) else {
            continue;
        };
        for (a, x) in acc.iter_mut().zip(vector) {
            *a += weight * f64::from(*x);
        }
    }
    WeightedVector(acc)
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &WeightedVector, v: &WeightedVector) -> f64 {
    let nu = u.norm();
    let nv = v.norm();
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let dot: f64 = u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::TextPipeline;
    use proptest::prelude::*;

    /// Lexicon over `docs` (each a whitespace-separated token list).
    fn lexicon_of(docs: &[&str]) -> Lexicon {
        let pipeline = TextPipeline::new(crate::text::StopwordList::empty());
        let mut lex = Lexicon::new();
        for d in docs {
            pipeline.add_document(&mut lex, d, "");
        }
        lex
    }

    #[test]
    fn idf_values() {
        let lex = lexicon_of(&["a b", "a", "a c", "a"]);
        assert_eq!(idf_weight(lex.tid("a").unwrap(), &lex).unwrap(), 0.0);

        let mut docs = vec!["rare common"];
        docs.extend(std::iter::repeat_n("common", 99));
        let lex = lexicon_of(&docs);
        let w = idf_weight(lex.tid("rare").unwrap(), &lex).unwrap();
        assert!((w - 4.605170185988092).abs() < 1e-12);

        let lex = lexicon_of(&["x", "x", "y", "y", "y", "y", "y", "y"]);
        let w = idf_weight(lex.tid("x").unwrap(), &lex).unwrap();
        assert!((w - 1.3862943611198906).abs() < 1e-12);

        assert!(matches!(idf_weight(99, &lex), Err(Error::UnknownTid(99))));
    }

    #[test]
    fn embed_weighted_hand_computed() {
        // N = 4; df(p) = 1 -> ln 4, df(q) = 2 -> ln 2, df(z) = 4 -> 0.
        let lex = lexicon_of(&["p q z", "q z", "z", "z"]);
        let (p, q, z) = (lex.tid("p").unwrap(), lex.tid("q").unwrap(), lex.tid("z").unwrap());
        let mut m = EmbeddingMatrix::new(2);
        m.insert(p, vec![1.0, 2.0]).unwrap();
        m.insert(q, vec![-1.0, 0.5]).unwrap();
        m.insert(z, vec![3.0, 3.0]).unwrap();

        let v = embed_weighted(&[p, q], &m, &lex);
        let (l4, l2) = (4f64.ln(), 2f64.ln());
        let expected = [l4 - l2, l4 * 2.0 + l2 * 0.5];
        for (got, want) in v.components().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }

        assert!(embed_weighted(&[], &m, &lex).is_zero());
        assert!(embed_weighted(&[z], &m, &lex).is_zero());
        assert!(embed_weighted(&[77], &m, &lex).is_zero());
    }

    #[test]
    fn cosine_examples() {
        let v = WeightedVector::from_components(vec![0.3, -1.2, 2.0]);
        assert!((cosine(&v, &v) - 1.0).abs() < 1e-15);
        let neg = WeightedVector::from_components(v.components().iter().map(|x| -x).collect());
        assert!((cosine(&v, &neg) + 1.0).abs() < 1e-15);
        let e1 = WeightedVector::from_components(vec![1.0, 0.0, 0.0]);
        let e2 = WeightedVector::from_components(vec![0.0, 1.0, 0.0]);
        assert_eq!(cosine(&e1, &e2), 0.0);
        assert_eq!(cosine(&e1, &WeightedVector::zeros(3)), 0.0);
    }

    #[test]
    fn matrix_rejects_bad_vectors() {
        let mut m = EmbeddingMatrix::new(2);
        assert!(m.insert(1, vec![1.0]).is_err());
        assert!(m.insert(1, vec![1.0, f32::NAN]).is_err());
    }

    fn vec3() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, 3)
    }

    proptest! {
        #[test]
        fn cosine_symmetric_and_scale_invariant(u in vec3(), v in vec3(), alpha in 0.01f64..100.0) {
            let (u, v) = (WeightedVector::from_components(u), WeightedVector::from_components(v));
            prop_assert!((cosine(&u, &v) - cosine(&v, &u)).abs() < 1e-12);
            let scaled = WeightedVector::from_components(u.components().iter().map(|x| x * alpha).collect());
            prop_assert!((cosine(&scaled, &v) - cosine(&u, &v)).abs() < 1e-9);
        }

        #[test]
        fn embed_weighted_is_additive(a in prop::collection::vec(1u32..=4, 0..6), b in prop::collection::vec(1u32..=4, 0..6)) {
            let lex = lexicon_of(&["t1 t2", "t2 t3", "t3 t4 t1", "t4"]);
            let mut m = EmbeddingMatrix::new(3);
            for tid in 1..=4u32 {
                m.insert(tid, vec![tid as f32, -(tid as f32) / 2.0, 0.25]).unwrap();
            }
            let joined: Vec<u32> = a.iter().chain(&b).copied().collect();
            let whole = embed_weighted(&joined, &m, &lex);
            let (ea, eb) = (embed_weighted(&a, &m, &lex), embed_weighted(&b, &m, &lex));
            for i in 0..3 {
                prop_assert!((whole.components()[i] - ea.components()[i] - eb.components()[i]).abs() < 1e-9);
            }
        }
    }
}
