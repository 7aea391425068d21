//! Ranking target accounts for each source account, hit-rate and MRR
//! metrics, the name-similarity baseline, and a synthetic benchmark
//! generator with known ground truth.

mod baseline;
mod metrics;
mod ranking;
mod synth;

pub use baseline::name_baseline;
pub use metrics::{compute_metrics, GroundTruth, Metrics, HR_K};
pub use ranking::{rank_all, write_rankings_csv, CandidateIndex, RankingResult};
pub use synth::{generate_synthetic_pair, NameLexicon, SynthConfig, SyntheticPair};
