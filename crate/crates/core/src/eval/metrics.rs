use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ranking::RankingResult;
use crate::error::{Error, Result};

/// Cut-offs reported for hit rate.
pub const HR_K: [usize; 7] = [1, 2, 3, 4, 5, 10, 30];

/// One-to-one `(source id, target id)` matches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pairs: Vec<(String, String)>,
}

impl GroundTruth {
    pub fn new(pairs: Vec<(String, String)>) -> Result<Self> {
        let mut sources = HashSet::new();
        let mut targets = HashSet::new();
        for (s, t) in &pairs {
            if !sources.insert(s) {
                return Err(Error::ConflictingAnchor(s.clone()));
            }
            if !targets.insert(t) {
                return Err(Error::ConflictingAnchor(t.clone()));
            }
        }
        Ok(GroundTruth { pairs })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::new(crate::model::load_anchors(path)?)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> Vec<&str> {
        self.pairs.iter().map(|(s, _)| s.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub hr: BTreeMap<usize, f64>,
    pub mrr: f64,
    pub n_pairs: usize,
    /// Pairs whose true target never appears among the candidates; they
    /// count as misses.
    pub n_missing: usize,
}

impl Metrics {
    pub fn hr_at(&self, k: usize) -> f64 {
        self.hr.get(&k).copied().unwrap_or(0.0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Hit rate at each cut-off in [`HR_K`] and mean reciprocal rank of the
/// true targets.
pub fn compute_metrics(rankings: &[RankingResult], truth: &GroundTruth) -> Result<Metrics> {
    if truth.is_empty() {
        return Err(Error::Config("ground truth is empty".into()));
    }
    let by_source: HashMap<&str, &RankingResult> = rankings.iter().map(|r| (r.source_id.as_str(), r)).collect();
    let mut hits = [0usize; HR_K.len()];
    let mut reciprocal = 0.0;
    let mut n_missing = 0;
    for (s, t) in truth.pairs() {
        let ranking = by_source
            .get(s.as_str())
            .ok_or_else(|| Error::UnknownId(format!("no ranking for source {s}")))?;
        let Some(rank) = ranking.rank_of(t) else {
            n_missing += 1;
            continue;
        };
        reciprocal += 1.0 / rank as f64;
        for (h, &k) in hits.iter_mut().zip(&HR_K) {
            if rank <= k {
                *h += 1;
            }
        }
    }
    let n = truth.len() as f64;
    Ok(Metrics {
        hr: HR_K.iter().zip(hits).map(|(&k, h)| (k, h as f64 / n)).collect(),
        mrr: reciprocal / n,
        n_pairs: truth.len(),
        n_missing,
    })
}
