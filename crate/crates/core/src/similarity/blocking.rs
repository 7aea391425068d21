//! Candidate-pair generation. Pairs are a superset filter: only candidates
//! get a similarity entry.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sorted, duplicate-free `(i, j)` index pairs with `i < j`.
pub type CandidatePairs = Vec<(usize, usize)>;

fn pairs_from_buckets<K: Send>(buckets: HashMap<K, Vec<usize>>) -> CandidatePairs {
    let mut pairs: Vec<(usize, usize)> = buckets
        .into_par_iter()
        .flat_map_iter(|(_, members)| {
            let mut out = Vec::with_capacity(members.len() * members.len().saturating_sub(1) / 2);
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    out.push((i.min(j), i.max(j)));
                }
            }
            out
        })
        .collect();
    pairs.par_sort_unstable();
    pairs.dedup();
    pairs
}

/// Pairs of strings sharing at least one character trigram of their
/// lowercased text. Strings shorter than three characters are indexed by
/// their whole lowercased text.
pub fn trigram_candidate_pairs<S: AsRef<str>>(objects: &[S]) -> CandidatePairs {
    let mut index: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, s) in objects.iter().enumerate() {
        let chars: Vec<char> = s.as_ref().to_lowercase().chars().collect();
        if chars.len() < 3 {
            index.entry(chars.into_iter().collect()).or_default().push(i);
            continue;
        }
        let mut grams: Vec<String> = chars.windows(3).map(|w| w.iter().collect()).collect();
        grams.sort_unstable();
        grams.dedup();
        for g in grams {
            index.entry(g).or_default().push(i);
        }
    }
    pairs_from_buckets(index)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LshParams {
    pub tables: usize,
    pub bits: usize,
}

impl Default for LshParams {
    fn default() -> Self {
        LshParams { tables: 16, bits: 8 }
    }
}

/// Random-hyperplane LSH: each table hashes a vector to the sign pattern of
/// `bits` Gaussian projections. Vectors sharing a signature in any table are
/// paired.
pub fn lsh_candidate_pairs(vectors: &[Vec<f64>], params: LshParams, seed: u64) -> Result<CandidatePairs> {
    let LshParams { tables, bits } = params;
    if tables == 0 || bits == 0 || bits > 64 {
        return Err(Error::Config(format!(
            "LSH needs tables >= 1 and 1 <= bits <= 64, got {tables} x {bits}"
        )));
    }
    let Some(dim) = vectors.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let planes: Vec<f64> = (0..tables * bits * dim)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();

    let signatures: Vec<Vec<u64>> = vectors
        .par_iter()
        .map(|v| {
            planes
                .chunks_exact(bits * dim)
                .map(|table| {
                    table.chunks_exact(dim).enumerate().fold(0u64, |sig, (b, plane)| {
                        if crate::linalg::dot(plane, v) >= 0.0 {
                            sig | (1 << b)
                        } else {
                            sig
                        }
                    })
                })
                .collect()
        })
        .collect();

    let mut buckets: HashMap<(usize, u64), Vec<usize>> = HashMap::new();
    for (i, sigs) in signatures.iter().enumerate() {
        for (t, &sig) in sigs.iter().enumerate() {
            buckets.entry((t, sig)).or_default().push(i);
        }
    }
    Ok(pairs_from_buckets(buckets))
}
