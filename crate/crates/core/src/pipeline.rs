//! File-based stages: ingest, similarity, object embedding, factoid
//! training, linking and evaluation. Every stage takes its randomness from
//! a seed derived from the global seed and the stage name.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::eval::{compute_metrics, name_baseline, rank_all, write_rankings_csv, CandidateIndex, GroundTruth, Metrics, RankingResult};
use crate::factoid::{identity_table, train, FactoidEmbedding, FactoidTrainConfig};
use crate::model::{
    build_unified_network, load_anchors, load_network, merge_anchor_pairs, read_snapshot, write_snapshot, Attribute,
    SocialNetwork, UnifiedNetwork,
};
use crate::object_embedding::{embed_objects, ObjectTrainConfig};
use crate::similarity::{build_similarity_matrix, candidate_pairs_for, LshParams, SparseSimilarityMatrix};

pub const UNIFIED_FILE: &str = "unified.jsonl";
pub const USERS_FILE: &str = "users.emb";
pub const REPORT_FILE: &str = "train_report.json";
pub const RANKINGS_FILE: &str = "rankings.csv";
pub const METRICS_FILE: &str = "metrics.json";

pub fn similarity_file(attribute: Attribute) -> String {
    format!("sim_{}.csv", attribute.short_name())
}

pub fn object_file(attribute: Attribute) -> String {
    format!("obj_{}.emb", attribute.short_name())
}

pub fn baseline_file(attribute: Attribute) -> String {
    format!("baseline_{}.json", attribute.short_name())
}

/// Seed for one stage, derived from the global seed and the stage name.
pub fn stage_seed(seed: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stage.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = (seed ^ h).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct NetworkInput {
    pub users: PathBuf,
    pub edges: Option<PathBuf>,
    /// Treat every edge as mutual.
    pub undirected: bool,
}

impl NetworkInput {
    pub fn load(&self, network_id: &str) -> Result<SocialNetwork> {
        let net = load_network(&self.users, self.edges.as_deref(), network_id)?;
        Ok(if self.undirected { net.symmetrized() } else { net })
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub source: NetworkInput,
    pub target: NetworkInput,
    pub predicates: Vec<Attribute>,
    pub object: ObjectTrainConfig,
    pub lsh: LshParams,
    pub factoid: FactoidTrainConfig,
    pub anchors: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub top_k: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(source: NetworkInput, target: NetworkInput, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            source,
            target,
            predicates: Attribute::ALL.to_vec(),
            object: ObjectTrainConfig::default(),
            lsh: LshParams::default(),
            factoid: FactoidTrainConfig::default(),
            anchors: None,
            truth: None,
            top_k: 30,
            out_dir: out_dir.into(),
            seed: 0,
        }
    }
}

/// What a full run produced.
#[derive(Debug)]
pub struct PipelineOutput {
    pub network: UnifiedNetwork,
    pub embedding: FactoidEmbedding,
    pub accounts: EmbeddingTable,
    pub rankings: Vec<RankingResult>,
    pub metrics: Option<Metrics>,
    pub baselines: BTreeMap<Attribute, Metrics>,
}

fn staged<T>(stage: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage(stage))
}

fn write_json(value: &impl Serialize, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Keeps only the selected attributes on every account.
pub fn restrict_attributes(mut net: SocialNetwork, keep: &[Attribute]) -> SocialNetwork {
    for u in net.users.iter_mut() {
        u.attributes.retain(|a, _| keep.contains(a));
    }
    net
}

/// Loads both networks, unifies them, merges anchors if any, and writes the
/// snapshot.
pub fn ingest(
    source: &SocialNetwork,
    target: &SocialNetwork,
    anchors: Option<&Path>,
    out_dir: &Path,
) -> Result<UnifiedNetwork> {
    let run = || {
        ensure_dir(out_dir)?;
        let mut net = build_unified_network(source, target)?;
        if let Some(path) = anchors {
            net = merge_anchor_pairs(&net, &load_anchors(path)?)?;
        }
        write_snapshot(&net, &out_dir.join(UNIFIED_FILE))?;
        Ok(net)
    };
    staged("ingest", run())
}

/// Sparse similarity matrix for every selected attribute that has objects.
pub fn similarities(
    net: &UnifiedNetwork,
    predicates: &[Attribute],
    lsh: LshParams,
    seed: u64,
    out_dir: &Path,
) -> Result<BTreeMap<Attribute, SparseSimilarityMatrix>> {
    let run = || {
        ensure_dir(out_dir)?;
        let mut out = BTreeMap::new();
        for &attribute in predicates {
            let objects = net.catalog().objects(attribute);
            if objects.is_empty() {
                continue;
            }
            let seed = stage_seed(seed, &format!("sim/{}", attribute.short_name()));
            let candidates = candidate_pairs_for(objects, lsh, seed)?;
            let matrix = build_similarity_matrix(attribute, objects, &candidates)?;
            matrix.write_csv(&out_dir.join(similarity_file(attribute)))?;
            out.insert(attribute, matrix);
        }
        Ok(out)
    };
    staged("sim", run())
}

/// Object embedding per similarity matrix.
pub fn object_tables(
    matrices: &BTreeMap<Attribute, SparseSimilarityMatrix>,
    cfg: &ObjectTrainConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<BTreeMap<Attribute, EmbeddingTable>> {
    let run = || {
        ensure_dir(out_dir)?;
        let mut out = BTreeMap::new();
        for (&attribute, matrix) in matrices {
            let cfg = ObjectTrainConfig {
                seed: stage_seed(seed, &format!("embed-objects/{}", attribute.short_name())),
                ..cfg.clone()
            };
            let embedding = embed_objects(matrix, &cfg)?;
            embedding.table.write(&out_dir.join(object_file(attribute)))?;
            out.insert(attribute, embedding.table);
        }
        Ok(out)
    };
    staged("embed-objects", run())
}

/// Trains user vectors and writes the per-account table and training report.
pub fn train_users(
    net: &UnifiedNetwork,
    tables: &BTreeMap<Attribute, EmbeddingTable>,
    cfg: &FactoidTrainConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<(FactoidEmbedding, EmbeddingTable)> {
    let run = || {
        ensure_dir(out_dir)?;
        let cfg = FactoidTrainConfig {
            seed: stage_seed(seed, "train"),
            ..cfg.clone()
        };
        let embedding = train(net, tables, &cfg)?;
        let accounts = identity_table(net, &embedding.users)?;
        accounts.write(&out_dir.join(USERS_FILE))?;
        write_json(&embedding.report, &out_dir.join(REPORT_FILE))?;
        Ok((embedding, accounts))
    };
    staged("train", run())
}

/// Ranks every target account for every source account and writes the top
/// `top_k` rows per source.
pub fn link(accounts: &EmbeddingTable, top_k: usize, out_dir: &Path) -> Result<Vec<RankingResult>> {
    let run = || {
        ensure_dir(out_dir)?;
        let index = CandidateIndex::from_identity_table(accounts)?;
        let sources: Vec<String> = index.source_ids().map(str::to_string).collect();
        let rankings = rank_all(&index, &sources)?;
        write_rankings_csv(&rankings, top_k, &out_dir.join(RANKINGS_FILE))?;
        Ok(rankings)
    };
    staged("link", run())
}

/// Truth pairs whose source account was not given as an anchor.
pub fn held_out_truth(truth: &GroundTruth, anchors: &[(String, String)]) -> Result<GroundTruth> {
    let anchored: std::collections::HashSet<&str> = anchors.iter().map(|(s, _)| s.as_str()).collect();
    GroundTruth::new(
        truth
            .pairs()
            .iter()
            .filter(|(s, _)| !anchored.contains(s.as_str()))
            .cloned()
            .collect(),
    )
}

pub fn evaluate(rankings: &[RankingResult], truth: &GroundTruth, path: &Path) -> Result<Metrics> {
    let run = || {
        let metrics = compute_metrics(rankings, truth)?;
        write_json(&metrics, path)?;
        Ok(metrics)
    };
    staged("eval", run())
}

/// Runs every stage in order, writing all intermediate files to `out_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let (source, target) = staged("ingest", (|| Ok((cfg.source.load("source")?, cfg.target.load("target")?)))())?;
    let truth = match &cfg.truth {
        Some(path) => Some(staged("eval", GroundTruth::load(path))?),
        None => None,
    };
    run_networks(cfg, source, target, truth.as_ref())
}

/// [`run_pipeline`] on networks already in memory. `cfg.source`,
/// `cfg.target` and `cfg.truth` are ignored.
pub fn run_networks(
    cfg: &PipelineConfig,
    source: SocialNetwork,
    target: SocialNetwork,
    truth: Option<&GroundTruth>,
) -> Result<PipelineOutput> {
    let source = restrict_attributes(source, &cfg.predicates);
    let target = restrict_attributes(target, &cfg.predicates);
    let out = cfg.out_dir.as_path();
    let network = ingest(&source, &target, cfg.anchors.as_deref(), out)?;
    let matrices = similarities(&network, &cfg.predicates, cfg.lsh, cfg.seed, out)?;
    let tables = object_tables(&matrices, &cfg.object, cfg.seed, out)?;
    let (embedding, accounts) = train_users(&network, &tables, &cfg.factoid, cfg.seed, out)?;
    let rankings = link(&accounts, cfg.top_k, out)?;

    let mut metrics = None;
    let mut baselines = BTreeMap::new();
    if let Some(truth) = truth {
        let truth = match &cfg.anchors {
            Some(a) => staged("eval", load_anchors(a).and_then(|a| held_out_truth(truth, &a)))?,
            None => truth.clone(),
        };
        metrics = Some(evaluate(&rankings, &truth, &out.join(METRICS_FILE))?);
        for &attribute in cfg.predicates.iter().filter(|a| a.is_text()) {
            let r = name_baseline(&source, &target, attribute);
            baselines.insert(attribute, evaluate(&r, &truth, &out.join(baseline_file(attribute)))?);
        }
    }
    Ok(PipelineOutput {
        network,
        embedding,
        accounts,
        rankings,
        metrics,
        baselines,
    })
}

/// Reloads a snapshot written by [`ingest`].
pub fn load_unified(out_dir: &Path) -> Result<UnifiedNetwork> {
    read_snapshot(&out_dir.join(UNIFIED_FILE))
}

/// Reloads the similarity matrices written by [`similarities`].
pub fn load_similarities(dir: &Path, predicates: &[Attribute]) -> Result<BTreeMap<Attribute, SparseSimilarityMatrix>> {
    let mut out = BTreeMap::new();
    for &attribute in predicates {
        let path = dir.join(similarity_file(attribute));
        if path.exists() {
            out.insert(attribute, SparseSimilarityMatrix::read_csv(&path)?);
        }
    }
    Ok(out)
}

/// Reloads the object tables written by [`object_tables`].
pub fn load_object_tables(dir: &Path, predicates: &[Attribute]) -> Result<BTreeMap<Attribute, EmbeddingTable>> {
    let mut out = BTreeMap::new();
    for &attribute in predicates {
        let path = dir.join(object_file(attribute));
        if path.exists() {
            out.insert(attribute, EmbeddingTable::read(&path)?);
        }
    }
    Ok(out)
}
