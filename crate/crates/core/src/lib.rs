//! Cross-network user identity linkage by factoid embedding.
//!
//! Accounts from two networks are rewritten as factoids (`user has_name
//! "..."`, `user follows user`) over one unified graph. Attribute values are
//! embedded from their pairwise similarities, user vectors are then trained
//! so that each factoid is predictable from its subject, and accounts are
//! linked across networks by cosine similarity of the user vectors.

pub mod embedding;
pub mod error;
pub mod eval;
pub mod factoid;
pub mod linalg;
pub mod model;
pub mod object_embedding;
pub mod pipeline;
pub mod similarity;
pub mod toy;

pub use embedding::EmbeddingTable;
pub use error::{Error, Result};
pub use eval::{compute_metrics, generate_synthetic_pair, name_baseline, GroundTruth, Metrics, RankingResult, SynthConfig};
pub use factoid::{train, FactoidEmbedding, FactoidTrainConfig};
pub use model::{build_unified_network, merge_anchor_pairs, Attribute, AttributeObject, SocialNetwork, UnifiedNetwork, UserRecord};
pub use object_embedding::{embed_objects, ObjectTrainConfig};
pub use pipeline::{run_pipeline, PipelineConfig};
