//! Word-tensor storage: a plain-text embedding file backed by a seeded
//! deterministic generator for words the file does not cover.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::tensor::Tensor;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("embedding file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Serves a tensor per `(word, shape)` pair.
///
/// File entries win; anything else is generated from the seed, uniformly in
/// `[-1, 1]`, keyed on the word and the requested shape so repeated lookups
/// and independent processes agree.
#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    seed: u64,
    file_entries: BTreeMap<(String, Vec<usize>), Tensor>,
}

impl EmbeddingStore {
    pub fn seeded(seed: u64) -> EmbeddingStore {
        EmbeddingStore {
            seed,
            file_entries: BTreeMap::new(),
        }
    }

    /// Parse the embedding file format: one tensor per line,
    /// `word<TAB>d1,d2,...,dk<TAB>v1 v2 ... vN` with `N` the shape product,
    /// row-major values. `#` starts a comment line.
    pub fn from_file_text(text: &str, seed: u64) -> Result<EmbeddingStore, EmbeddingError> {
        let mut store = EmbeddingStore::seeded(seed);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            let word = parts.next().unwrap_or_default().trim();
            let dims_text = parts.next().ok_or_else(|| EmbeddingError::Parse {
                line: idx + 1,
                msg: "missing dimension field".to_string(),
            })?;
            let values_text = parts.next().ok_or_else(|| EmbeddingError::Parse {
                line: idx + 1,
                msg: "missing values field".to_string(),
            })?;
            let shape: Vec<usize> = dims_text
                .split(',')
                .map(|d| {
                    d.trim().parse::<usize>().map_err(|_| EmbeddingError::Parse {
                        line: idx + 1,
                        msg: format!("bad dimension `{d}`"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let values: Vec<f64> = values_text
                .split_whitespace()
                .map(|v| {
                    v.parse::<f64>().map_err(|_| EmbeddingError::Parse {
                        line: idx + 1,
                        msg: format!("bad value `{v}`"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let expected: usize = shape.iter().product();
            if values.len() != expected {
                return Err(EmbeddingError::Parse {
                    line: idx + 1,
                    msg: format!("expected {expected} values, got {}", values.len()),
                });
            }
            store
                .file_entries
                .insert((word.to_string(), shape.clone()), Tensor::new(shape, values));
        }
        Ok(store)
    }

    pub fn get(&self, word: &str, shape: &[usize]) -> Tensor {
        if let Some(t) = self.file_entries.get(&(word.to_string(), shape.to_vec())) {
            return t.clone();
        }
        generate(self.seed, word, shape)
    }
}

/// FNV-1a over the word and shape; mixed with the seed to key the stream.
fn stream_key(word: &str, shape: &[usize]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in word.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    for d in shape {
        h ^= *d as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn generate(seed: u64, word: &str, shape: &[usize]) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream_key(word, shape));
    let len: usize = shape.iter().product();
    let data = (0..len)
        .map(|_| {
            // 53 random mantissa bits mapped onto [-1, 1)
            let bits = rng.next_u64() >> 11;
            bits as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect();
    Tensor::new(shape.to_vec(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_keyed() {
        let store = EmbeddingStore::seeded(42);
        let a = store.get("alice", &[4]);
        let b = store.get("alice", &[4]);
        assert_eq!(a, b);
        assert_ne!(store.get("alice", &[4]), store.get("bob", &[4]));
        assert_ne!(store.get("alice", &[4]).data(), &store.get("alice", &[2, 2]).data()[..]);
        let other_seed = EmbeddingStore::seeded(43);
        assert_ne!(a, other_seed.get("alice", &[4]));
    }

    #[test]
    fn values_stay_in_range() {
        let store = EmbeddingStore::seeded(7);
        let t = store.get("anything", &[100]);
        assert!(t.data().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn file_entries_override_generation() {
        let text = "# embeddings\nalice\t2\t0.5 -0.5\nloves\t2,2\t1 2 3 4\n";
        let store = EmbeddingStore::from_file_text(text, 42).unwrap();
        assert_eq!(store.get("alice", &[2]), Tensor::vector(vec![0.5, -0.5]));
        assert_eq!(
            store.get("loves", &[2, 2]),
            Tensor::matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]])
        );
        // a different shape for the same word falls back to the generator
        assert_eq!(store.get("alice", &[3]).shape(), &[3]);
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let err = EmbeddingStore::from_file_text("alice\t2\t0.5\n", 0).unwrap_err();
        assert!(matches!(err, EmbeddingError::Parse { line: 1, .. }));
        let err = EmbeddingStore::from_file_text("\n\nbob\tx\t1\n", 0).unwrap_err();
        assert!(matches!(err, EmbeddingError::Parse { line: 3, .. }));
    }
}
