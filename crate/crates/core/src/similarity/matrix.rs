use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use super::blocking::{lsh_candidate_pairs, trigram_candidate_pairs, CandidatePairs, LshParams};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::model::{Attribute, AttributeObject};

/// Cosine similarity of two feature vectors.
pub fn cosine_similarity(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let denom = norm(x) * norm(y);
    if denom == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(x, y) / denom).clamp(-1.0, 1.0))
}

/// Symmetric similarity matrix over the objects of one attribute. Only the
/// upper triangle of candidate pairs is stored; the diagonal is implicitly 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSimilarityMatrix {
    pub attribute: Attribute,
    pub n: usize,
    /// `(i, j, s)` with `i < j`, sorted by `(i, j)`.
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSimilarityMatrix {
    /// Writes `# pred=<name> n=<count>` followed by `i,j,s` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "# pred={} n={}", self.attribute.short_name(), self.n).map_err(io)?;
        for &(i, j, s) in &self.entries {
            writeln!(out, "{i},{j},{s}").map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(path, e))?
            .ok_or_else(|| parse_err(1, "empty file".into()))?;
        let (attribute, n) = parse_header(&header).ok_or_else(|| parse_err(1, format!("bad header {header:?}")))?;

        let mut entries = Vec::new();
        for (k, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || parse_err(k + 2, format!("expected i,j,s got {line:?}"));
            let mut parts = line.split(',');
            let (Some(i), Some(j), Some(s), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(bad());
            };
            let i: usize = i.trim().parse().map_err(|_| bad())?;
            let j: usize = j.trim().parse().map_err(|_| bad())?;
            let s: f64 = s.trim().parse().map_err(|_| bad())?;
            if i >= j || j >= n || !(-1.0..=1.0).contains(&s) {
                return Err(bad());
            }
            entries.push((i, j, s));
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Ok(SparseSimilarityMatrix { attribute, n, entries })
    }
}

fn parse_header(line: &str) -> Option<(Attribute, usize)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut attribute = None;
    let mut n = None;
    for field in rest.split_whitespace() {
        match field.split_once('=')? {
            ("pred", v) => attribute = Attribute::parse(v),
            ("n", v) => n = v.parse().ok(),
            _ => return None,
        }
    }
    Some((attribute?, n?))
}

/// Blocking appropriate to the attribute: trigram index for text, LSH for
/// feature vectors.
pub fn candidate_pairs_for(objects: &[AttributeObject], lsh: LshParams, seed: u64) -> Result<CandidatePairs> {
    if objects.iter().all(|o| o.as_text().is_some()) {
        let texts: Vec<&str> = objects.iter().filter_map(AttributeObject::as_text).collect();
        return Ok(trigram_candidate_pairs(&texts));
    }
    let vectors: Option<Vec<Vec<f64>>> = objects.iter().map(|o| o.as_vector().map(<[f64]>::to_vec)).collect();
    match vectors {
        Some(v) => lsh_candidate_pairs(&v, lsh, seed),
        None => Err(Error::Config("mixed text and vector objects".into())),
    }
}

/// Scores every candidate pair: `2 * jaro_winkler - 1` on lowercased text,
/// cosine on feature vectors.
pub fn build_similarity_matrix(
    attribute: Attribute,
    objects: &[AttributeObject],
    candidates: &[(usize, usize)],
) -> Result<SparseSimilarityMatrix> {
    let n = objects.len();
    let lowered: Vec<Option<String>> = objects.iter().map(|o| o.as_text().map(str::to_lowercase)).collect();
    let mut entries = candidates
        .par_iter()
        .map(|&(a, b)| {
            let (i, j) = (a.min(b), a.max(b));
            if i == j || j >= n {
                return Err(Error::Config(format!("candidate pair ({a}, {b}) invalid for {n} objects")));
            }
            let s = match (&lowered[i], &lowered[j], &objects[i], &objects[j]) {
                (Some(x), Some(y), _, _) => {
                    if x == y {
                        1.0
                    } else {
                        2.0 * super::jaro_winkler(x, y) - 1.0
                    }
                }
                (_, _, AttributeObject::Vector(x), AttributeObject::Vector(y)) => cosine_similarity(x, y)?,
                _ => return Err(Error::Config("mixed text and vector objects".into())),
            };
            Ok((i, j, s))
        })
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by_key(|&(i, j, _)| (i, j));
    entries.dedup_by_key(|&mut (i, j, _)| (i, j));
    debug_assert!(entries.iter().all(|e| (-1.0..=1.0).contains(&e.2)));
    Ok(SparseSimilarityMatrix { attribute, n, entries })
}
