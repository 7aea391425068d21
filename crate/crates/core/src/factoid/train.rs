use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::noise::NoiseDistribution;
use super::projection::{ProjectionGrad, ProjectionParams};
use super::sgd::{sgd_step_user_object, sgd_step_user_user, FactoidGradient};
use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::model::{Attribute, FactoidObject, NodeId, Predicate, UnifiedNetwork};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoidTrainConfig {
    pub dim: usize,
    /// Negatives per factoid.
    pub negatives: usize,
    pub learning_rate: f64,
    /// Learning rate reached at the last batch; decay is linear.
    pub min_learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// A predicate's projection is updated on every `w_update_period`-th of
    /// its batches.
    pub w_update_period: usize,
    pub norm_cap: f64,
    pub seed: u64,
    /// Initial entries are uniform in `[-init_scale / sqrt(dim), init_scale / sqrt(dim)]`.
    pub init_scale: f64,
    /// Also update the followee of a follow factoid through the projection.
    /// Off by default: the extra pull drives two disconnected follow graphs
    /// apart and swamps the attribute signal that links them.
    #[serde(default)]
    pub followee_gradient: bool,
}

impl Default for FactoidTrainConfig {
    fn default() -> Self {
        FactoidTrainConfig {
            dim: 64,
            negatives: 5,
            learning_rate: 0.025,
            min_learning_rate: 0.0001,
            batch_size: 256,
            epochs: 50,
            w_update_period: 100,
            norm_cap: 1.0,
            seed: 0,
            init_scale: 0.5,
            followee_gradient: false,
        }
    }
}

impl FactoidTrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim == 0 {
            return fail("user dimension must be at least 1");
        }
        if self.negatives == 0 {
            return fail("need at least one negative per factoid");
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1");
        }
        if self.w_update_period == 0 {
            return fail("projection update period must be at least 1");
        }
        if !(self.learning_rate > 0.0) || !(self.min_learning_rate >= 0.0) {
            return fail("learning rate must be positive");
        }
        if !(self.norm_cap > 0.0) {
            return fail("norm cap must be positive");
        }
        Ok(())
    }
}

/// Mean factoid objective per predicate over one epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_objective: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: FactoidTrainConfig,
    pub seed: u64,
    pub batches_per_epoch: usize,
    pub updates: usize,
    pub followee_receives_gradient: bool,
    pub epochs: Vec<EpochStats>,
    pub final_w_norm: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct FactoidEmbedding {
    /// One row per unified node, id = node index.
    pub users: EmbeddingTable,
    pub projections: Vec<ProjectionParams>,
    pub report: TrainReport,
}

/// Initial user table, drawn from stream 0 of the training seed.
pub fn init_user_table(node_count: usize, cfg: &FactoidTrainConfig) -> EmbeddingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);
    let ids = (0..node_count).map(|i| i.to_string()).collect();
    EmbeddingTable::uniform(cfg.dim, ids, cfg.init_scale / (cfg.dim as f64).sqrt(), &mut rng)
}

/// Expands a node-indexed table to one row per account, ids `src:<id>` /
/// `tgt:<id>`. Merged nodes give both of their accounts the same vector.
pub fn identity_table(net: &UnifiedNetwork, nodes: &EmbeddingTable) -> Result<EmbeddingTable> {
    if nodes.len() != net.node_count() {
        return Err(Error::MissingRow(nodes.len().min(net.node_count())));
    }
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for (i, node) in net.nodes().iter().enumerate() {
        for identity in &node.identities {
            ids.push(identity.qualified());
            data.extend_from_slice(nodes.row(i));
        }
    }
    EmbeddingTable::new(nodes.dim(), ids, data)
}

enum Context {
    Object(Attribute),
    Follow,
}

/// Factoids of one predicate visited as an endless stream of shuffled passes.
struct FactoidStream {
    predicate: Predicate,
    context: Context,
    /// `(subject, object row or followee node)`
    items: Vec<(NodeId, usize)>,
    cursor: usize,
    params: ProjectionParams,
    acc: ProjectionGrad,
    grad: FactoidGradient,
    batches: usize,
    objective_sum: f64,
    objective_count: usize,
}

impl FactoidStream {
    fn next_batch(&mut self, size: usize, rng: &mut ChaCha8Rng, out: &mut Vec<(NodeId, usize)>) {
        out.clear();
        for _ in 0..size.min(self.items.len()) {
            if self.cursor == 0 {
                self.items.shuffle(rng);
            }
            out.push(self.items[self.cursor]);
            self.cursor = (self.cursor + 1) % self.items.len();
        }
    }
}

/// Round-robin negative-sampling SGD: each cycle runs one batch per
/// user-object predicate (in attribute order) and then one batch of follow
/// factoids. An epoch is enough cycles for the largest predicate to be
/// visited once.
pub fn train(
    net: &UnifiedNetwork,
    object_tables: &BTreeMap<Attribute, EmbeddingTable>,
    cfg: &FactoidTrainConfig,
) -> Result<FactoidEmbedding> {
    cfg.validate()?;
    let n = net.node_count();
    let mut users = init_user_table(n, cfg);

    let mut streams = Vec::new();
    for (&attribute, table) in object_tables {
        let predicate = Predicate::Has(attribute);
        let mut items = Vec::new();
        for f in net.factoids_with(predicate) {
            let FactoidObject::Object(idx) = f.object else {
                continue;
            };
            if idx >= table.len() {
                return Err(Error::MissingObjectEmbedding {
                    predicate: predicate.name().to_string(),
                    index: idx,
                });
            }
            items.push((f.subject, idx));
        }
        if items.is_empty() {
            continue;
        }
        let params = ProjectionParams::identity(predicate, cfg.dim, table.dim(), cfg.norm_cap)?;
        streams.push(new_stream(predicate, Context::Object(attribute), items, params));
    }
    let follows: Vec<(NodeId, usize)> = net
        .factoids_with(Predicate::Follows)
        .filter_map(|f| match f.object {
            FactoidObject::User(u) => Some((f.subject, u.0)),
            FactoidObject::Object(_) => None,
        })
        .collect();
    let out_degree_law = if follows.is_empty() {
        None
    } else {
        let params = ProjectionParams::identity(Predicate::Follows, cfg.dim, cfg.dim, cfg.norm_cap)?;
        streams.push(new_stream(Predicate::Follows, Context::Follow, follows, params));
        Some(NoiseDistribution::out_degree(&net.out_degrees())?)
    };
    if streams.is_empty() {
        return Err(Error::EmptyFactoids);
    }
    let uniform_law = NoiseDistribution::uniform(n)?;

    let largest = streams.iter().map(|s| s.items.len()).max().unwrap_or(0);
    let cycles_per_epoch = largest.div_ceil(cfg.batch_size);
    let total_batches = (cfg.epochs * cycles_per_epoch * streams.len()).max(1) as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut batch = Vec::with_capacity(cfg.batch_size);
    let mut negatives = Vec::with_capacity(cfg.negatives);
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut batch_index = 0usize;
    let mut updates = 0usize;

    for epoch in 0..cfg.epochs {
        for _ in 0..cycles_per_epoch {
            for stream in streams.iter_mut() {
                let lr = cfg.learning_rate - (cfg.learning_rate - cfg.min_learning_rate) * (batch_index as f64 / total_batches);
                batch_index += 1;
                stream.batches += 1;
                let tick = stream.batches % cfg.w_update_period == 0;
                let law = match stream.context {
                    Context::Object(_) => &uniform_law,
                    Context::Follow => out_degree_law.as_ref().expect("follow stream implies follows"),
                };
                stream.next_batch(cfg.batch_size, &mut rng, &mut batch);
                for &(subject, target) in &batch {
                    negatives.clear();
                    for _ in 0..cfg.negatives {
                        match law.sample_excluding(subject, &mut rng) {
                            Some(k) => negatives.push(k),
                            None => break,
                        }
                    }
                    let acc = if tick { Some(&mut stream.acc) } else { None };
                    let objective = match stream.context {
                        Context::Object(attribute) => sgd_step_user_object(
                            &mut users,
                            subject,
                            object_tables[&attribute].row(target),
                            &negatives,
                            &stream.params,
                            lr,
                            &mut stream.grad,
                            acc,
                        ),
                        Context::Follow => sgd_step_user_user(
                            &mut users,
                            subject,
                            NodeId(target),
                            &negatives,
                            &stream.params,
                            lr,
                            &mut stream.grad,
                            acc,
                            cfg.followee_gradient,
                        ),
                    }?;
                    stream.objective_sum += objective;
                    stream.objective_count += 1;
                    updates += 1;
                }
                if tick {
                    stream.params.apply_gradient(&stream.acc, lr);
                    stream.acc.clear();
                }
            }
        }
        let mut mean_objective = BTreeMap::new();
        for s in streams.iter_mut() {
            if s.objective_count > 0 {
                mean_objective.insert(s.predicate.name().to_string(), s.objective_sum / s.objective_count as f64);
            }
            s.objective_sum = 0.0;
            s.objective_count = 0;
        }
        epochs.push(EpochStats {
            epoch: epoch + 1,
            mean_objective,
        });
    }

    let final_w_norm = streams
        .iter()
        .map(|s| (s.predicate.name().to_string(), s.params.frobenius_norm()))
        .collect();
    let report = TrainReport {
        config: cfg.clone(),
        seed: cfg.seed,
        batches_per_epoch: cycles_per_epoch * streams.len(),
        updates,
        followee_receives_gradient: cfg.followee_gradient,
        epochs,
        final_w_norm,
    };
    Ok(FactoidEmbedding {
        users,
        projections: streams.into_iter().map(|s| s.params).collect(),
        report,
    })
}

fn new_stream(predicate: Predicate, context: Context, items: Vec<(NodeId, usize)>, params: ProjectionParams) -> FactoidStream {
    FactoidStream {
        predicate,
        context,
        items,
        cursor: 0,
        acc: ProjectionGrad::zeros_like(&params),
        grad: FactoidGradient::new(&params),
        params,
        batches: 0,
        objective_sum: 0.0,
        objective_count: 0,
    }
}
