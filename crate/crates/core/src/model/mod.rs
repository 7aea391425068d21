//! Social networks, the unified factoid network built from two of them, and
//! anchor merging for the semi-supervised variant.

mod io;
mod snapshot;
mod unified;

pub use io::{
    load_anchors, load_edges, load_network, load_users, parse_users_jsonl, write_pairs_csv, write_users_jsonl,
};
pub use snapshot::{read_snapshot, write_snapshot};
pub use unified::{
    build_unified_network, merge_anchor_pairs, Factoid, FactoidObject, Identity, NodeId,
    ObjectCatalog, Side, UnifiedNetwork, UserNode,
};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// A user-object attribute kind. The key is the JSONL attribute name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    Username,
    ScreenName,
    Image,
}

impl Attribute {
    pub const ALL: [Attribute; 3] = [Attribute::Username, Attribute::ScreenName, Attribute::Image];

    /// Attribute name used in users files.
    pub fn key(self) -> &'static str {
        match self {
            Attribute::Username => "username",
            Attribute::ScreenName => "screen_name",
            Attribute::Image => "image_features",
        }
    }

    /// Short name used on the command line and in output file names.
    pub fn short_name(self) -> &'static str {
        match self {
            Attribute::Username => "username",
            Attribute::ScreenName => "screen_name",
            Attribute::Image => "image",
        }
    }

    pub fn predicate_name(self) -> &'static str {
        match self {
            Attribute::Username => "has_username",
            Attribute::ScreenName => "has_screen_name",
            Attribute::Image => "has_image",
        }
    }

    pub fn is_text(self) -> bool {
        !matches!(self, Attribute::Image)
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.key() == key)
    }

    /// Accepts the short name, the users-file key, or the predicate name.
    pub fn parse(name: &str) -> Option<Self> {
        let name = name.trim();
        Self::ALL
            .into_iter()
            .find(|a| a.short_name() == name || a.key() == name || a.predicate_name() == name)
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Relation type of a factoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Predicate {
    Has(Attribute),
    Follows,
}

impl Predicate {
    pub fn name(self) -> &'static str {
        match self {
            Predicate::Has(a) => a.predicate_name(),
            Predicate::Follows => "follows",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        if name == "follows" {
            return Some(Predicate::Follows);
        }
        Attribute::ALL
            .into_iter()
            .find(|a| a.predicate_name() == name)
            .map(Predicate::Has)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Predicate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Predicate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Predicate::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown predicate {name:?}")))
    }
}

/// Value of one attribute: free text or a precomputed feature vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttributeObject {
    Text(String),
    Vector(Vec<f64>),
}

impl AttributeObject {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            AttributeObject::Text(s) => Some(s),
            AttributeObject::Vector(_) => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            AttributeObject::Vector(v) => Some(v),
            AttributeObject::Text(_) => None,
        }
    }
}

/// NFC-normalize and trim. Case is preserved.
pub fn normalize_text(s: &str) -> String {
    s.nfc().collect::<String>().trim().to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub local_id: String,
    pub attributes: BTreeMap<Attribute, AttributeObject>,
}

impl UserRecord {
    pub fn new(local_id: impl Into<String>) -> Self {
        UserRecord {
            local_id: local_id.into(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with(mut self, attribute: Attribute, value: AttributeObject) -> Self {
        self.attributes.insert(attribute, value);
        self
    }

    pub fn with_text(self, attribute: Attribute, text: impl Into<String>) -> Self {
        self.with(attribute, AttributeObject::Text(text.into()))
    }

    pub fn attribute(&self, attribute: Attribute) -> Option<&AttributeObject> {
        self.attributes.get(&attribute)
    }
}

/// One online social network: identity records and directed follow edges.
#[derive(Clone, Debug, PartialEq)]
pub struct SocialNetwork {
    pub network_id: String,
    pub users: Vec<UserRecord>,
    pub edges: Vec<(String, String)>,
}

impl SocialNetwork {
    /// Normalizes attribute text, drops repeated edges and validates every
    /// invariant of the network.
    pub fn new(
        network_id: impl Into<String>,
        mut users: Vec<UserRecord>,
        edges: Vec<(String, String)>,
    ) -> Result<Self> {
        let network_id = network_id.into();
        let mut dims: HashMap<Attribute, usize> = HashMap::new();
        let mut ids = HashSet::with_capacity(users.len());
        for user in &mut users {
            validate_id(&user.local_id)?;
            if !ids.insert(user.local_id.clone()) {
                return Err(Error::DuplicateId {
                    network: network_id.clone(),
                    id: user.local_id.clone(),
                });
            }
            for (&attribute, value) in user.attributes.iter_mut() {
                let invalid = |reason: &str| Error::InvalidAttribute {
                    id: user.local_id.clone(),
                    attribute: attribute.key().to_string(),
                    reason: reason.to_string(),
                };
                match (attribute.is_text(), value) {
                    (true, AttributeObject::Text(text)) => {
                        *text = normalize_text(text);
                        if text.is_empty() {
                            return Err(invalid("empty text"));
                        }
                    }
                    (false, AttributeObject::Vector(v)) => {
                        if v.is_empty() {
                            return Err(invalid("empty feature vector"));
                        }
                        if v.iter().any(|x| !x.is_finite()) {
                            return Err(invalid("non-finite feature value"));
                        }
                        let dim = *dims.entry(attribute).or_insert(v.len());
                        if dim != v.len() {
                            return Err(invalid(&format!(
                                "feature vector has {} entries, expected {dim}",
                                v.len()
                            )));
                        }
                    }
                    (true, _) => return Err(invalid("expected text")),
                    (false, _) => return Err(invalid("expected a feature vector")),
                }
            }
        }

        let mut seen = HashSet::with_capacity(edges.len());
        let mut kept = Vec::with_capacity(edges.len());
        for (from, to) in edges {
            for end in [&from, &to] {
                if !ids.contains(end) {
                    return Err(Error::DanglingEdge {
                        network: network_id.clone(),
                        from: from.clone(),
                        to: to.clone(),
                        missing: end.clone(),
                    });
                }
            }
            if from == to {
                return Err(Error::SelfLoop {
                    network: network_id,
                    id: from,
                });
            }
            if seen.insert((from.clone(), to.clone())) {
                kept.push((from, to));
            }
        }

        Ok(SocialNetwork {
            network_id,
            users,
            edges: kept,
        })
    }

    pub fn empty(network_id: impl Into<String>) -> Self {
        SocialNetwork {
            network_id: network_id.into(),
            users: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Treats every edge as an undirected friendship: adds the reverse of each
    /// edge that is not already present.
    pub fn symmetrized(mut self) -> Self {
        let mut seen: HashSet<(String, String)> = self.edges.iter().cloned().collect();
        let reversed: Vec<_> = self
            .edges
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        let mut out = Vec::with_capacity(self.edges.len() * 2);
        for (edge, rev) in self.edges.drain(..).zip(reversed) {
            out.push(edge);
            if seen.insert(rev.clone()) {
                out.push(rev);
            }
        }
        self.edges = out;
        self
    }

    pub fn user(&self, local_id: &str) -> Option<&UserRecord> {
        self.users.iter().find(|u| u.local_id == local_id)
    }

    pub fn attribute_count(&self) -> usize {
        self.users.iter().map(|u| u.attributes.len()).sum()
    }
}

fn validate_id(id: &str) -> Result<()> {
    let reason = if id.is_empty() {
        "empty id"
    } else if id.chars().any(|c| c.is_whitespace() || c == ',') {
        "ids may not contain whitespace or commas"
    } else {
        return Ok(());
    };
    Err(Error::InvalidAttribute {
        id: id.to_string(),
        attribute: "id".to_string(),
        reason: reason.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(a: &str, b: &str) -> (String, String) {
        (a.to_string(), b.to_string())
    }

    #[test]
    fn text_is_trimmed_and_nfc_normalized() {
        // "e" + combining acute accent composes to U+00E9
        let user = UserRecord::new("1").with_text(Attribute::ScreenName, "  Re\u{301}my ");
        let net = SocialNetwork::new("s", vec![user], vec![]).unwrap();
        let text = net.users[0].attribute(Attribute::ScreenName).unwrap();
        assert_eq!(text.as_text(), Some("R\u{e9}my"));
    }

    #[test]
    fn blank_text_rejected() {
        let user = UserRecord::new("1").with_text(Attribute::Username, "   ");
        let err = SocialNetwork::new("s", vec![user], vec![]).unwrap_err();
        assert!(matches!(err, Error::InvalidAttribute { .. }));
    }

    #[test]
    fn mixed_feature_dimensions_rejected() {
        let users = vec![
            UserRecord::new("1").with(Attribute::Image, AttributeObject::Vector(vec![1.0, 0.0])),
            UserRecord::new("2").with(Attribute::Image, AttributeObject::Vector(vec![1.0])),
        ];
        assert!(SocialNetwork::new("s", users, vec![]).is_err());
    }

    #[test]
    fn text_value_for_image_rejected() {
        let user = UserRecord::new("1").with_text(Attribute::Image, "cat.png");
        assert!(SocialNetwork::new("s", vec![user], vec![]).is_err());
    }

    #[test]
    fn duplicate_ids_and_bad_edges() {
        let users = vec![UserRecord::new("1"), UserRecord::new("1")];
        assert!(matches!(
            SocialNetwork::new("s", users, vec![]),
            Err(Error::DuplicateId { .. })
        ));

        let users = vec![UserRecord::new("1"), UserRecord::new("2")];
        assert!(matches!(
            SocialNetwork::new("s", users.clone(), vec![edge("1", "99")]),
            Err(Error::DanglingEdge { ref missing, .. }) if missing == "99"
        ));
        assert!(matches!(
            SocialNetwork::new("s", users, vec![edge("2", "2")]),
            Err(Error::SelfLoop { .. })
        ));
    }

    #[test]
    fn repeated_edges_collapse() {
        let users = vec![UserRecord::new("1"), UserRecord::new("2")];
        let net = SocialNetwork::new("s", users, vec![edge("1", "2"), edge("1", "2")]).unwrap();
        assert_eq!(net.edges.len(), 1);
    }

    #[test]
    fn symmetrized_adds_missing_reverse_edges() {
        let users = vec![UserRecord::new("a"), UserRecord::new("b"), UserRecord::new("c")];
        let net = SocialNetwork::new("fb", users, vec![edge("a", "b"), edge("b", "a"), edge("b", "c")])
            .unwrap()
            .symmetrized();
        assert_eq!(
            net.edges,
            vec![edge("a", "b"), edge("b", "a"), edge("b", "c"), edge("c", "b")]
        );
    }

    #[test]
    fn predicate_names_round_trip() {
        for p in [
            Predicate::Follows,
            Predicate::Has(Attribute::Username),
            Predicate::Has(Attribute::ScreenName),
            Predicate::Has(Attribute::Image),
        ] {
            assert_eq!(Predicate::from_name(p.name()), Some(p));
        }
        assert_eq!(Attribute::parse("image"), Some(Attribute::Image));
        assert_eq!(Attribute::parse("image_features"), Some(Attribute::Image));
        assert_eq!(Attribute::parse("bio"), None);
    }
}
