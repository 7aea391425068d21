//! Per-attribute sparse similarity matrices over catalog objects.

mod blocking;
mod jaro;
mod matrix;

pub use blocking::{lsh_candidate_pairs, trigram_candidate_pairs, CandidatePairs, LshParams};
pub use jaro::{jaro, jaro_winkler};
pub use matrix::{build_similarity_matrix, candidate_pairs_for, cosine_similarity, SparseSimilarityMatrix};

/// Text similarity in `[-1, 1]`: Jaro-Winkler of the lowercased strings,
/// mapped affinely so identical text scores 1 and disjoint text scores -1.
pub fn text_similarity(a: &str, b: &str) -> f64 {
    2.0 * jaro_winkler(&a.to_lowercase(), &b.to_lowercase()) - 1.0
}
