//! The two-network walkthrough example: five Twitter-like accounts and four
//! Facebook-like accounts with display names and follow links.
//!
//! Ground truth: 1-6 (Amy Tan), 2-7 (Desmond / Desmond Ng), 3-8 (C L / Cindy Lim),
//! 4-9 (Joey Lim / Joey L). Account 5 has no counterpart.

use crate::factoid::FactoidTrainConfig;
use crate::model::{Attribute, SocialNetwork, UserRecord};

/// The names in this example are display names.
pub const NAME: Attribute = Attribute::ScreenName;

pub const SOURCE_NAMES: [(&str, &str); 5] = [
    ("1", "Amy Tan"),
    ("2", "Desmond"),
    ("3", "C L"),
    ("4", "Joey Lim"),
    ("5", "Nicole Tan"),
];

pub const SOURCE_EDGES: [(&str, &str); 7] = [
    ("1", "2"),
    ("2", "1"),
    ("1", "3"),
    ("3", "1"),
    ("3", "2"),
    ("4", "3"),
    ("5", "3"),
];

pub const TARGET_NAMES: [(&str, &str); 4] = [
    ("6", "Amy Tan"),
    ("7", "Desmond Ng"),
    ("8", "Cindy Lim"),
    ("9", "Joey L"),
];

pub const TARGET_EDGES: [(&str, &str); 8] = [
    ("6", "7"),
    ("7", "6"),
    ("6", "8"),
    ("8", "6"),
    ("7", "8"),
    ("8", "7"),
    ("8", "9"),
    ("9", "8"),
];

pub const TRUTH: [(&str, &str); 4] = [("1", "6"), ("2", "7"), ("3", "8"), ("4", "9")];

fn network(id: &str, names: &[(&str, &str)], edges: &[(&str, &str)]) -> SocialNetwork {
    let users = names
        .iter()
        .map(|(id, name)| UserRecord::new(*id).with_text(NAME, *name))
        .collect();
    let edges = edges
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    SocialNetwork::new(id, users, edges).expect("toy networks are valid")
}

pub fn two_network_example() -> (SocialNetwork, SocialNetwork) {
    (
        network("twitter", &SOURCE_NAMES, &SOURCE_EDGES),
        network("facebook", &TARGET_NAMES, &TARGET_EDGES),
    )
}

/// Training settings for the example: the default configuration with enough
/// epochs for nine accounts.
pub fn train_config() -> FactoidTrainConfig {
    FactoidTrainConfig {
        epochs: 500,
        ..FactoidTrainConfig::default()
    }
}
