use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use factoidlink::eval::{generate_synthetic_pair, rank_all, CandidateIndex, GroundTruth, SynthConfig};
use factoidlink::model::{load_anchors, write_pairs_csv, write_users_jsonl, Attribute};
use factoidlink::pipeline::{self, NetworkInput, PipelineConfig};
use factoidlink::similarity::LshParams;
use factoidlink::{EmbeddingTable, Error, FactoidTrainConfig, ObjectTrainConfig, Result};

#[derive(Parser)]
#[command(name = "factoidlink", version, about = "Link user accounts across two social networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load both networks and write the unified snapshot
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        preds: PredArgs,
        /// Known `source_id,target_id` pairs to merge before training
        #[arg(long)]
        anchors: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build sparse object similarity matrices from the snapshot
    Sim {
        #[command(flatten)]
        preds: PredArgs,
        #[command(flatten)]
        lsh: LshArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Embed the objects of each attribute from its similarity matrix
    EmbedObjects {
        #[command(flatten)]
        preds: PredArgs,
        #[command(flatten)]
        object: ObjectArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Train user embeddings from the factoids and object embeddings
    Train {
        #[command(flatten)]
        preds: PredArgs,
        #[command(flatten)]
        train: TrainArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Rank target accounts for every source account
    Link {
        /// Rows per source account in the rankings file
        #[arg(long, default_value_t = 30)]
        top_k: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Score the trained embeddings against known matches
    Eval {
        /// `source_id,target_id` ground truth pairs
        #[arg(long)]
        truth: PathBuf,
        /// Anchors used in training; their sources are left out of the score
        #[arg(long)]
        anchors: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Generate a synthetic pair of networks with known matches
    Synth {
        #[arg(long, default_value_t = 200)]
        n_users: usize,
        /// Mean out-degree of the latent follow graph
        #[arg(long, default_value_t = 8.0)]
        mean_degree: f64,
        /// Probability that a latent edge survives in each network
        #[arg(long, default_value_t = 0.8)]
        overlap: f64,
        /// Probability that a name is perturbed in a network
        #[arg(long, default_value_t = 0.3)]
        name_noise: f64,
        /// Image feature dimension (0 for no images)
        #[arg(long, default_value_t = 32)]
        feature_dim: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run ingest, sim, embed-objects, train, link and eval in order
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        preds: PredArgs,
        #[command(flatten)]
        lsh: LshArgs,
        #[command(flatten)]
        object: ObjectArgs,
        #[command(flatten)]
        train: TrainArgs,
        /// Known `source_id,target_id` pairs to merge before training
        #[arg(long)]
        anchors: Option<PathBuf>,
        /// Ground truth pairs; when given, metrics are written and printed
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Rows per source account in the rankings file
        #[arg(long, default_value_t = 30)]
        top_k: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Directory holding every stage's inputs and outputs
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct InputArgs {
    /// Source network users (JSONL)
    #[arg(long)]
    source_users: PathBuf,
    /// Source network follow edges (CSV `follower,followee`)
    #[arg(long)]
    source_edges: Option<PathBuf>,
    /// Target network users (JSONL)
    #[arg(long)]
    target_users: PathBuf,
    /// Target network follow edges (CSV `follower,followee`)
    #[arg(long)]
    target_edges: Option<PathBuf>,
    /// Treat source edges as mutual (friendship networks)
    #[arg(long)]
    source_undirected: bool,
    /// Treat target edges as mutual
    #[arg(long)]
    target_undirected: bool,
}

impl InputArgs {
    fn networks(&self) -> (NetworkInput, NetworkInput) {
        (
            NetworkInput {
                users: self.source_users.clone(),
                edges: self.source_edges.clone(),
                undirected: self.source_undirected,
            },
            NetworkInput {
                users: self.target_users.clone(),
                edges: self.target_edges.clone(),
                undirected: self.target_undirected,
            },
        )
    }
}

#[derive(Args)]
struct PredArgs {
    /// Attributes to use, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_attribute, default_value = "username,screen_name,image")]
    preds: Vec<Attribute>,
}

fn parse_attribute(s: &str) -> std::result::Result<Attribute, String> {
    Attribute::parse(s).ok_or_else(|| format!("unknown attribute {s:?} (expected username, screen_name or image)"))
}

#[derive(Args)]
struct LshArgs {
    /// LSH hash tables for feature-vector blocking
    #[arg(long, default_value_t = LshParams::default().tables)]
    lsh_tables: usize,
    /// Hyperplanes per LSH table
    #[arg(long, default_value_t = LshParams::default().bits)]
    lsh_bits: usize,
}

impl LshArgs {
    fn params(&self) -> LshParams {
        LshParams {
            tables: self.lsh_tables,
            bits: self.lsh_bits,
        }
    }
}

#[derive(Args)]
struct ObjectArgs {
    /// Object embedding dimension
    #[arg(long, default_value_t = ObjectTrainConfig::default().dim)]
    dim_obj: usize,
    /// Passes over each similarity matrix
    #[arg(long, default_value_t = ObjectTrainConfig::default().epochs)]
    obj_epochs: usize,
    /// Initial object learning rate, decayed linearly
    #[arg(long, default_value_t = ObjectTrainConfig::default().learning_rate)]
    obj_lr: f64,
}

impl ObjectArgs {
    fn config(&self) -> ObjectTrainConfig {
        ObjectTrainConfig {
            dim: self.dim_obj,
            epochs: self.obj_epochs,
            learning_rate: self.obj_lr,
            ..ObjectTrainConfig::default()
        }
    }
}

#[derive(Args)]
struct TrainArgs {
    /// User embedding dimension
    #[arg(long, default_value_t = FactoidTrainConfig::default().dim)]
    dim_user: usize,
    /// Negative samples per factoid
    #[arg(long, default_value_t = FactoidTrainConfig::default().negatives)]
    neg: usize,
    #[arg(long, default_value_t = FactoidTrainConfig::default().epochs)]
    epochs: usize,
    /// Factoids per batch
    #[arg(long, default_value_t = FactoidTrainConfig::default().batch_size)]
    batch: usize,
    /// Initial learning rate, decayed linearly
    #[arg(long, default_value_t = FactoidTrainConfig::default().learning_rate)]
    lr: f64,
    /// Frobenius norm cap on each projection matrix
    #[arg(long, default_value_t = FactoidTrainConfig::default().norm_cap)]
    norm_cap: f64,
    /// Batches of a predicate between projection updates
    #[arg(long, default_value_t = FactoidTrainConfig::default().w_update_period)]
    w_update_period: usize,
    /// Also update followees through the follow projection
    #[arg(long)]
    followee_gradient: bool,
}

impl TrainArgs {
    fn config(&self) -> FactoidTrainConfig {
        FactoidTrainConfig {
            dim: self.dim_user,
            negatives: self.neg,
            epochs: self.epochs,
            batch_size: self.batch,
            learning_rate: self.lr,
            norm_cap: self.norm_cap,
            w_update_period: self.w_update_period,
            followee_gradient: self.followee_gradient,
            ..FactoidTrainConfig::default()
        }
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn held_out(truth: &Path, anchors: Option<&Path>) -> Result<GroundTruth> {
    let truth = GroundTruth::load(truth)?;
    match anchors {
        Some(a) => pipeline::held_out_truth(&truth, &load_anchors(a)?),
        None => Ok(truth),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            input,
            preds,
            anchors,
            common,
        } => {
            let (s, t) = input.networks();
            let source = pipeline::restrict_attributes(s.load("source").map_err(|e| e.in_stage("ingest"))?, &preds.preds);
            let target = pipeline::restrict_attributes(t.load("target").map_err(|e| e.in_stage("ingest"))?, &preds.preds);
            let net = pipeline::ingest(&source, &target, anchors.as_deref(), &common.out_dir)?;
            eprintln!("{} nodes, {} factoids", net.node_count(), net.factoids().len());
        }
        Command::Sim { preds, lsh, common } => {
            let net = pipeline::load_unified(&common.out_dir).map_err(|e| e.in_stage("sim"))?;
            let m = pipeline::similarities(&net, &preds.preds, lsh.params(), common.seed, &common.out_dir)?;
            for (a, s) in &m {
                eprintln!("{}: {} objects, {} stored pairs", a.short_name(), s.n, s.entries.len());
            }
        }
        Command::EmbedObjects { preds, object, common } => {
            let m = pipeline::load_similarities(&common.out_dir, &preds.preds).map_err(|e| e.in_stage("embed-objects"))?;
            pipeline::object_tables(&m, &object.config(), common.seed, &common.out_dir)?;
        }
        Command::Train { preds, train, common } => {
            let load = || Ok((pipeline::load_unified(&common.out_dir)?, pipeline::load_object_tables(&common.out_dir, &preds.preds)?));
            let (net, tables) = load().map_err(|e: Error| e.in_stage("train"))?;
            pipeline::train_users(&net, &tables, &train.config(), common.seed, &common.out_dir)?;
        }
        Command::Link { top_k, common } => {
            let users = EmbeddingTable::read(&common.out_dir.join(pipeline::USERS_FILE)).map_err(|e| e.in_stage("link"))?;
            pipeline::link(&users, top_k, &common.out_dir)?;
        }
        Command::Eval { truth, anchors, common } => {
            let run = || {
                let users = EmbeddingTable::read(&common.out_dir.join(pipeline::USERS_FILE))?;
                let truth = held_out(&truth, anchors.as_deref())?;
                let index = CandidateIndex::from_identity_table(&users)?;
                let rankings = rank_all(&index, &truth.sources())?;
                Ok((rankings, truth))
            };
            let (rankings, truth) = run().map_err(|e: Error| e.in_stage("eval"))?;
            let metrics = pipeline::evaluate(&rankings, &truth, &common.out_dir.join(pipeline::METRICS_FILE))?;
            print_json(&metrics)?;
        }
        Command::Synth {
            n_users,
            mean_degree,
            overlap,
            name_noise,
            feature_dim,
            common,
        } => {
            let cfg = SynthConfig {
                n_users,
                edge_prob: SynthConfig::with_mean_degree(n_users, mean_degree),
                overlap_frac: overlap,
                name_noise,
                feature_dim,
                seed: pipeline::stage_seed(common.seed, "synth"),
            };
            let pair = generate_synthetic_pair(&cfg)?;
            let dir = &common.out_dir;
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })?;
            write_users_jsonl(&pair.source.users, &dir.join("source_users.jsonl"))?;
            write_pairs_csv(&pair.source.edges, &dir.join("source_edges.csv"))?;
            write_users_jsonl(&pair.target.users, &dir.join("target_users.jsonl"))?;
            write_pairs_csv(&pair.target.edges, &dir.join("target_edges.csv"))?;
            write_pairs_csv(pair.truth.pairs(), &dir.join("truth.csv"))?;
        }
        Command::Pipeline {
            input,
            preds,
            lsh,
            object,
            train,
            anchors,
            truth,
            top_k,
            common,
        } => {
            let (source, target) = input.networks();
            let cfg = PipelineConfig {
                predicates: preds.preds,
                object: object.config(),
                lsh: lsh.params(),
                factoid: train.config(),
                anchors,
                truth,
                top_k,
                seed: common.seed,
                ..PipelineConfig::new(source, target, common.out_dir)
            };
            let out = pipeline::run_pipeline(&cfg)?;
            if let Some(m) = &out.metrics {
                print_json(m)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FACTOIDLINK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // the pool can only be set once; a failure here just keeps the default
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
