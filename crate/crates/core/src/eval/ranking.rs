use std::cmp::Ordering;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::model::{Identity, Side};

/// Target accounts for one source account, best first.
#[derive(Clone, Debug, PartialEq)]
pub struct RankingResult {
    pub source_id: String,
    /// `(target id, score)`, scores non-increasing, ties by ascending id.
    pub candidates: Vec<(String, f64)>,
}

impl RankingResult {
    /// Sorts `(target id, score)` pairs into ranking order.
    pub fn from_scores(source_id: impl Into<String>, mut candidates: Vec<(String, f64)>) -> Self {
        candidates.sort_by(|a, b| match b.1.partial_cmp(&a.1) {
            Some(Ordering::Equal) | None => a.0.cmp(&b.0),
            Some(o) => o,
        });
        RankingResult {
            source_id: source_id.into(),
            candidates,
        }
    }

    /// 1-based rank of `target_id`.
    pub fn rank_of(&self, target_id: &str) -> Option<usize> {
        self.candidates.iter().position(|(t, _)| t == target_id).map(|p| p + 1)
    }

    pub fn top(&self) -> Option<&str> {
        self.candidates.first().map(|(t, _)| t.as_str())
    }
}

/// Account embeddings split by side, with target rows pre-normalized for
/// cosine scoring.
pub struct CandidateIndex {
    dim: usize,
    sources: Vec<(String, Vec<f64>)>,
    targets: Vec<(String, Vec<f64>)>,
}

impl CandidateIndex {
    /// Builds from a table whose ids are `src:<id>` / `tgt:<id>`.
    pub fn from_identity_table(table: &EmbeddingTable) -> Result<Self> {
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        for (id, row) in table.rows() {
            let identity = Identity::parse_qualified(id).ok_or_else(|| Error::UnknownId(id.to_string()))?;
            let entry = (identity.local_id, row.to_vec());
            match identity.side {
                Side::Source => sources.push(entry),
                Side::Target => targets.push(entry),
            }
        }
        for (_, v) in targets.iter_mut() {
            let n = norm(v);
            if n > 0.0 {
                v.iter_mut().for_each(|x| *x /= n);
            }
        }
        Ok(CandidateIndex {
            dim: table.dim(),
            sources,
            targets,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source_ids(&self) -> impl Iterator<Item = &str> {
        self.sources.iter().map(|(id, _)| id.as_str())
    }

    pub fn target_count(&self) -> usize {
        self.targets.len()
    }

    /// All target accounts ordered by cosine similarity to `source_id`.
    pub fn rank_targets(&self, source_id: &str) -> Result<RankingResult> {
        let (_, v) = self
            .sources
            .iter()
            .find(|(id, _)| id == source_id)
            .ok_or_else(|| Error::UnknownId(format!("src:{source_id}")))?;
        if self.targets.is_empty() {
            return Err(Error::Config("no target accounts to rank".into()));
        }
        let n = norm(v);
        let scores = self
            .targets
            .iter()
            .map(|(id, t)| {
                let s = if n == 0.0 { 0.0 } else { dot(v, t) / n };
                (id.clone(), s)
            })
            .collect();
        Ok(RankingResult::from_scores(source_id, scores))
    }
}

/// Rankings for the given sources, in input order.
pub fn rank_all<S: AsRef<str> + Sync>(index: &CandidateIndex, sources: &[S]) -> Result<Vec<RankingResult>> {
    sources.par_iter().map(|s| index.rank_targets(s.as_ref())).collect()
}

/// `source_id,rank,target_id,score` with a header row, top `k` per source.
pub fn write_rankings_csv(rankings: &[RankingResult], k: usize, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "source_id,rank,target_id,score").map_err(io)?;
    for r in rankings {
        for (rank, (target, score)) in r.candidates.iter().take(k).enumerate() {
            writeln!(out, "{},{},{},{}", r.source_id, rank + 1, target, score).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}
