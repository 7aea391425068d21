//! User embeddings learned from user-object and user-user factoids with
//! negative sampling and per-predicate linear projections.

mod noise;
mod projection;
mod sgd;
mod train;

pub use noise::{NoiseDistribution, NoiseKind};
pub use projection::{ProjectionGrad, ProjectionParams};
pub use sgd::{score_user_object, sgd_step_user_object, sgd_step_user_user, FactoidGradient};
pub use train::{
    identity_table, init_user_table, train, EpochStats, FactoidEmbedding, FactoidTrainConfig, TrainReport,
};
