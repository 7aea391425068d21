//! Object embeddings whose pairwise dot products reproduce a sparse
//! similarity matrix, trained by SGD on the squared reconstruction error
//! over stored entries and the unit diagonal.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::similarity::SparseSimilarityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectTrainConfig {
    pub dim: usize,
    pub learning_rate: f64,
    /// Learning rate reached at the last update; decay is linear.
    pub min_learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Initial entries are uniform in `[-init_scale / sqrt(dim), init_scale / sqrt(dim)]`.
    pub init_scale: f64,
}

impl Default for ObjectTrainConfig {
    fn default() -> Self {
        ObjectTrainConfig {
            dim: 32,
            learning_rate: 0.05,
            min_learning_rate: 0.001,
            epochs: 100,
            seed: 0,
            init_scale: 0.5,
        }
    }
}

impl ObjectTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("object dimension must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) || !(self.min_learning_rate >= 0.0) {
            return Err(Error::Config("object learning rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ObjectEmbedding {
    /// Row `i` embeds object `i`; ids are the decimal object indices.
    pub table: EmbeddingTable,
    /// Reconstruction error after each epoch.
    pub epoch_loss: Vec<f64>,
}

impl ObjectEmbedding {
    pub fn final_loss(&self) -> Option<f64> {
        self.epoch_loss.last().copied()
    }
}

/// Squared reconstruction error summed over ordered index pairs: each stored
/// off-diagonal entry counts twice (as `(i, j)` and `(j, i)`), each diagonal
/// term `(|v_i|^2 - 1)^2` once.
pub fn reconstruction_error(s: &SparseSimilarityMatrix, table: &EmbeddingTable) -> Result<f64> {
    if table.len() < s.n {
        return Err(Error::MissingRow(table.len()));
    }
    let diag: f64 = (0..s.n)
        .map(|i| {
            let v = table.row(i);
            (dot(v, v) - 1.0).powi(2)
        })
        .sum();
    let off: f64 = s
        .entries
        .iter()
        .map(|&(i, j, sij)| (dot(table.row(i), table.row(j)) - sij).powi(2))
        .sum();
    Ok(diag + 2.0 * off)
}

pub fn embed_objects(s: &SparseSimilarityMatrix, cfg: &ObjectTrainConfig) -> Result<ObjectEmbedding> {
    cfg.validate()?;
    if s.n == 0 {
        return Err(Error::Config(format!("no {} objects to embed", s.attribute)));
    }
    let stage = format!("embed-objects:{}", s.attribute);
    let m = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ids = (0..s.n).map(|i| i.to_string()).collect();
    let mut table = EmbeddingTable::uniform(m, ids, cfg.init_scale / (m as f64).sqrt(), &mut rng);

    // one step per term of the loss: diagonal (i, i, 1), and each stored
    // entry in both orientations
    let mut order: Vec<(usize, usize, f64)> = (0..s.n)
        .map(|i| (i, i, 1.0))
        .chain(s.entries.iter().flat_map(|&(i, j, v)| [(i, j, v), (j, i, v)]))
        .collect();
    let total_steps = (cfg.epochs * order.len()).max(1) as f64;
    let mut step = 0usize;
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);
    let mut vi = vec![0.0; m];

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &(i, j, target) in &order {
            let lr = cfg.learning_rate - (cfg.learning_rate - cfg.min_learning_rate) * (step as f64 / total_steps);
            step += 1;
            let data = table.as_mut_slice();
            if i == j {
                let v = &mut data[i * m..(i + 1) * m];
                // both sides of the update land on the same vector
                let r = dot(v, v) - target;
                let scale = 1.0 - 2.0 * lr * r;
                v.iter_mut().for_each(|x| *x *= scale);
            } else {
                vi.copy_from_slice(&data[i * m..(i + 1) * m]);
                let r = dot(&vi, &data[j * m..(j + 1) * m]) - target;
                for k in 0..m {
                    let vj = data[j * m + k];
                    data[i * m + k] -= lr * r * vj;
                    data[j * m + k] -= lr * r * vi[k];
                }
            }
        }
        let loss = reconstruction_error(s, &table)?;
        if !loss.is_finite() || !table.is_finite() {
            return Err(Error::Divergence {
                stage,
                detail: format!("loss became {loss} in epoch {}", epoch + 1),
            });
        }
        epoch_loss.push(loss);
    }
    Ok(ObjectEmbedding { table, epoch_loss })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cosine_or_zero;
    use crate::model::Attribute;

    fn matrix(n: usize, entries: Vec<(usize, usize, f64)>) -> SparseSimilarityMatrix {
        SparseSimilarityMatrix {
            attribute: Attribute::Username,
            n,
            entries,
        }
    }

    fn cfg(dim: usize, epochs: usize, seed: u64) -> ObjectTrainConfig {
        ObjectTrainConfig {
            dim,
            epochs,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn single_object_lands_on_unit_sphere() {
        let out = embed_objects(&matrix(1, vec![]), &ObjectTrainConfig::default()).unwrap();
        let v = out.table.row(0);
        assert!((dot(v, v) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn identical_pair_aligns() {
        let out = embed_objects(&matrix(2, vec![(0, 1, 1.0)]), &ObjectTrainConfig::default()).unwrap();
        let c = cosine_or_zero(out.table.row(0), out.table.row(1));
        assert!(c >= 0.95, "{c}");
    }

    /// Exhaustive search over unit vectors in the plane at a 1-degree grid
    /// (first vector fixed by rotation invariance). Returns the minimizing
    /// `(cos(v1, v2), cos(v1, v3))`.
    fn grid_minimizer(s12: f64, s13: f64, s23: f64) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for a in 0..360 {
            for b in 0..360 {
                let (t2, t3) = ((a as f64).to_radians(), (b as f64).to_radians());
                let (c12, c13, c23) = (t2.cos(), t3.cos(), (t2 - t3).cos());
                let loss = 2.0 * ((c12 - s12).powi(2) + (c13 - s13).powi(2) + (c23 - s23).powi(2));
                if loss < best.0 {
                    best = (loss, c12, c13);
                }
            }
        }
        (best.1, best.2)
    }

    #[test]
    fn preserves_similarity_order_of_exhaustive_minimizer() {
        let (o12, o13) = grid_minimizer(0.9, -1.0, -1.0);
        assert!(o12 > o13);
        let s = matrix(3, vec![(0, 1, 0.9), (0, 2, -1.0), (1, 2, -1.0)]);
        for seed in 0..5 {
            let out = embed_objects(&s, &cfg(4, 100, seed)).unwrap();
            let t = &out.table;
            let c12 = cosine_or_zero(t.row(0), t.row(1));
            let c13 = cosine_or_zero(t.row(0), t.row(2));
            assert!(c12 > c13, "seed {seed}: {c12} vs {c13}");
        }
    }

    #[test]
    fn reconstruction_error_examples() {
        // orthonormal rows reproduce s = 0 exactly
        let t = EmbeddingTable::new(2, vec!["0".into(), "1".into()], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(reconstruction_error(&matrix(2, vec![(0, 1, 0.0)]), &t).unwrap(), 0.0);

        let zeros = EmbeddingTable::zeros(3, (0..4).map(|i| i.to_string()).collect());
        assert_eq!(reconstruction_error(&matrix(4, vec![]), &zeros).unwrap(), 4.0);

        assert!(matches!(
            reconstruction_error(&matrix(5, vec![]), &zeros),
            Err(Error::MissingRow(4))
        ));
    }

    #[test]
    fn reconstruction_error_matches_hand_sum() {
        let v = [[0.3, -0.7], [1.1, 0.2], [-0.4, 0.5]];
        let t = EmbeddingTable::new(2, (0..3).map(|i| i.to_string()).collect(), v.concat()).unwrap();
        let s = matrix(3, vec![(0, 1, 0.25), (0, 2, -0.5), (1, 2, 0.75)]);
        let d = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
        let mut hand = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j {
                    1.0
                } else {
                    let (lo, hi) = (i.min(j), i.max(j));
                    s.entries.iter().find(|e| e.0 == lo && e.1 == hi).unwrap().2
                };
                hand += (d(v[i], v[j]) - target).powi(2);
            }
        }
        assert!((reconstruction_error(&s, &t).unwrap() - hand).abs() < 1e-12);
    }

    #[test]
    fn deterministic_per_seed() {
        let s = matrix(4, vec![(0, 1, 0.5), (1, 3, -0.2), (2, 3, 0.9)]);
        let a = embed_objects(&s, &cfg(8, 20, 3)).unwrap();
        let b = embed_objects(&s, &cfg(8, 20, 3)).unwrap();
        assert_eq!(a.table, b.table);
        let c = embed_objects(&s, &cfg(8, 20, 4)).unwrap();
        assert_ne!(a.table, c.table);
    }

    #[test]
    fn divergence_is_reported() {
        let s = matrix(2, vec![(0, 1, 1.0)]);
        let wild = ObjectTrainConfig {
            learning_rate: 1e6,
            min_learning_rate: 1e6,
            init_scale: 10.0,
            ..cfg(4, 10, 0)
        };
        assert!(matches!(embed_objects(&s, &wild), Err(Error::Divergence { .. })));
    }

    #[test]
    fn rejects_empty_matrix_and_bad_config() {
        assert!(embed_objects(&matrix(0, vec![]), &ObjectTrainConfig::default()).is_err());
        assert!(embed_objects(&matrix(1, vec![]), &cfg(0, 1, 0)).is_err());
    }
}
