use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NodeId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Proportional to out-degree to the 3/4 power; used for follow factoids.
    OutDegree,
    /// Uniform over all user nodes; used for user-object factoids.
    Uniform,
}

/// Sampler of negative user nodes from normalized cumulative weights.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseDistribution {
    kind: NoiseKind,
    cumulative: Vec<f64>,
}

impl NoiseDistribution {
    fn from_weights(kind: NoiseKind, weights: impl Iterator<Item = f64>) -> Result<Self> {
        let mut cumulative: Vec<f64> = weights
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        let total = cumulative.last().copied().unwrap_or(0.0);
        if !(total > 0.0) {
            return Err(Error::EmptyDistribution);
        }
        cumulative.iter_mut().for_each(|c| *c /= total);
        // pin the end so a draw in [0, 1) always lands on a node
        let last = cumulative.len() - 1;
        cumulative[last] = 1.0;
        Ok(NoiseDistribution { kind, cumulative })
    }

    pub fn out_degree(degrees: &[usize]) -> Result<Self> {
        Self::from_weights(NoiseKind::OutDegree, degrees.iter().map(|&d| (d as f64).powf(0.75)))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(NoiseKind::Uniform, std::iter::repeat_n(1.0, n))
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn probability(&self, node: NodeId) -> f64 {
        let hi = self.cumulative[node.0];
        let lo = if node.0 == 0 { 0.0 } else { self.cumulative[node.0 - 1] };
        hi - lo
    }

    pub fn sample(&self, rng: &mut impl Rng) -> NodeId {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u);
        NodeId(i.min(self.cumulative.len() - 1))
    }

    /// Draws until the result differs from `exclude`. `None` when `exclude`
    /// carries all of the mass.
    pub fn sample_excluding(&self, exclude: NodeId, rng: &mut impl Rng) -> Option<NodeId> {
        if exclude.0 < self.len() && self.probability(exclude) >= 1.0 - 1e-12 {
            return None;
        }
        loop {
            let node = self.sample(rng);
            if node != exclude {
                return Some(node);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frequencies(dist: &NoiseDistribution, draws: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0usize; dist.len()];
        for _ in 0..draws {
            counts[dist.sample(&mut rng).0] += 1;
        }
        counts.into_iter().map(|c| c as f64 / draws as f64).collect()
    }

    #[test]
    fn uniform_over_four() {
        let dist = NoiseDistribution::uniform(4).unwrap();
        for f in frequencies(&dist, 100_000, 1) {
            assert!((f - 0.25).abs() <= 0.02, "{f}");
        }
    }

    #[test]
    fn out_degree_eight_vs_one() {
        let dist = NoiseDistribution::out_degree(&[8, 1]).unwrap();
        let expected = 8f64.powf(0.75) / (8f64.powf(0.75) + 1.0);
        assert!((expected - 0.8263).abs() < 1e-4);
        assert!((dist.probability(NodeId(0)) - expected).abs() < 1e-12);
        let f = frequencies(&dist, 100_000, 2);
        assert!((f[0] - expected).abs() <= 0.01, "{}", f[0]);
    }

    #[test]
    fn out_degree_symmetric_and_zero_degree_excluded() {
        let dist = NoiseDistribution::out_degree(&[1, 1]).unwrap();
        assert_eq!(dist.probability(NodeId(0)), 0.5);
        assert_eq!(dist.probability(NodeId(1)), 0.5);

        let dist = NoiseDistribution::out_degree(&[0, 3, 0, 2, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let n = dist.sample(&mut rng);
            assert!(n == NodeId(1) || n == NodeId(3));
        }
        assert_eq!(dist.probability(NodeId(4)), 0.0);
    }

    #[test]
    fn edgeless_network_has_no_out_degree_law() {
        assert!(matches!(NoiseDistribution::out_degree(&[0, 0, 0]), Err(Error::EmptyDistribution)));
        assert!(matches!(NoiseDistribution::uniform(0), Err(Error::EmptyDistribution)));
    }

    #[test]
    fn excluding_never_returns_excluded() {
        let dist = NoiseDistribution::out_degree(&[5, 1, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5_000 {
            assert_ne!(dist.sample_excluding(NodeId(0), &mut rng), Some(NodeId(0)));
        }
        let lone = NoiseDistribution::out_degree(&[0, 4]).unwrap();
        assert_eq!(lone.sample_excluding(NodeId(1), &mut rng), None);
    }

    #[test]
    fn deterministic_given_rng_state() {
        let dist = NoiseDistribution::out_degree(&[3, 1, 4, 1, 5]).unwrap();
        let a: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..100).map(|_| dist.sample(&mut rng)).collect()
        };
        let b: Vec<_> = {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            (0..100).map(|_| dist.sample(&mut rng)).collect()
        };
        assert_eq!(a, b);
    }
}
