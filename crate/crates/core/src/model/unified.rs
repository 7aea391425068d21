use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Attribute, AttributeObject, Predicate, SocialNetwork};
use crate::error::{Error, Result};

/// Dense id of a user node in the unified network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

impl Side {
    /// Prefix used for user ids in persisted embeddings.
    pub fn prefix(self) -> &'static str {
        match self {
            Side::Source => "src",
            Side::Target => "tgt",
        }
    }
}

/// One account of one network.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Identity {
    pub side: Side,
    pub local_id: String,
}

impl Identity {
    pub fn new(side: Side, local_id: impl Into<String>) -> Self {
        Identity {
            side,
            local_id: local_id.into(),
        }
    }

    pub fn source(local_id: impl Into<String>) -> Self {
        Self::new(Side::Source, local_id)
    }

    pub fn target(local_id: impl Into<String>) -> Self {
        Self::new(Side::Target, local_id)
    }

    /// `src:<id>` or `tgt:<id>`.
    pub fn qualified(&self) -> String {
        format!("{}:{}", self.side.prefix(), self.local_id)
    }

    pub fn parse_qualified(s: &str) -> Option<Self> {
        let (prefix, id) = s.split_once(':')?;
        let side = match prefix {
            "src" => Side::Source,
            "tgt" => Side::Target,
            _ => return None,
        };
        Some(Identity::new(side, id))
    }
}

/// A user node: one identity, or two after an anchor merge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserNode {
    pub identities: Vec<Identity>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactoidObject {
    /// Index into the catalog of the factoid's attribute.
    Object(usize),
    User(NodeId),
}

/// `<subject, predicate, object-or-user>`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factoid {
    pub subject: NodeId,
    pub predicate: Predicate,
    pub object: FactoidObject,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ObjectKey {
    Text(String),
    Vector(Vec<u64>),
}

impl ObjectKey {
    fn of(value: &AttributeObject) -> Self {
        match value {
            AttributeObject::Text(s) => ObjectKey::Text(s.clone()),
            // -0.0 and 0.0 are the same feature value
            AttributeObject::Vector(v) => {
                ObjectKey::Vector(v.iter().map(|x| (x + 0.0).to_bits()).collect())
            }
        }
    }
}

/// Distinct attribute values per attribute, in first-seen order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObjectCatalog {
    objects: BTreeMap<Attribute, Vec<AttributeObject>>,
}

impl ObjectCatalog {
    pub fn objects(&self, attribute: Attribute) -> &[AttributeObject] {
        self.objects.get(&attribute).map_or(&[], Vec::as_slice)
    }

    /// Attributes with at least one object.
    pub fn attributes(&self) -> impl Iterator<Item = Attribute> + '_ {
        self.objects.keys().copied()
    }

    pub(crate) fn from_parts(objects: BTreeMap<Attribute, Vec<AttributeObject>>) -> Self {
        ObjectCatalog { objects }
    }
}

#[derive(Default)]
struct CatalogBuilder {
    objects: BTreeMap<Attribute, Vec<AttributeObject>>,
    index: HashMap<(Attribute, ObjectKey), usize>,
    dims: HashMap<Attribute, usize>,
}

impl CatalogBuilder {
    fn intern(&mut self, attribute: Attribute, value: &AttributeObject) -> Result<usize> {
        if let AttributeObject::Vector(v) = value {
            let dim = *self.dims.entry(attribute).or_insert(v.len());
            if dim != v.len() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        let objects = self.objects.entry(attribute).or_default();
        let idx = *self
            .index
            .entry((attribute, ObjectKey::of(value)))
            .or_insert_with(|| {
                objects.push(value.clone());
                objects.len() - 1
            });
        Ok(idx)
    }
}

/// Both networks merged into one graph of user nodes, factoids and objects.
#[derive(Clone, Debug)]
pub struct UnifiedNetwork {
    pub source_label: String,
    pub target_label: String,
    nodes: Vec<UserNode>,
    factoids: Vec<Factoid>,
    catalog: ObjectCatalog,
    lookup: HashMap<Identity, NodeId>,
}

impl PartialEq for UnifiedNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.source_label == other.source_label
            && self.target_label == other.target_label
            && self.nodes == other.nodes
            && self.factoids == other.factoids
            && self.catalog == other.catalog
    }
}

impl UnifiedNetwork {
    pub(crate) fn from_parts(
        source_label: String,
        target_label: String,
        nodes: Vec<UserNode>,
        factoids: Vec<Factoid>,
        catalog: ObjectCatalog,
    ) -> Result<Self> {
        let mut lookup = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            for identity in &node.identities {
                if lookup.insert(identity.clone(), NodeId(i)).is_some() {
                    return Err(Error::DuplicateId {
                        network: format!("{:?}", identity.side),
                        id: identity.local_id.clone(),
                    });
                }
            }
        }
        let net = UnifiedNetwork {
            source_label,
            target_label,
            nodes,
            factoids,
            catalog,
            lookup,
        };
        net.check_references()?;
        Ok(net)
    }

    fn check_references(&self) -> Result<()> {
        let n = self.nodes.len();
        for f in &self.factoids {
            if f.subject.0 >= n {
                return Err(Error::UnknownId(format!("node {}", f.subject)));
            }
            match (f.predicate, f.object) {
                (Predicate::Follows, FactoidObject::User(u)) if u.0 < n => {}
                (Predicate::Has(a), FactoidObject::Object(i)) if i < self.catalog.objects(a).len() => {}
                _ => return Err(Error::UnknownId(format!("object of factoid {f:?}"))),
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[UserNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &UserNode {
        &self.nodes[id.0]
    }

    pub fn factoids(&self) -> &[Factoid] {
        &self.factoids
    }

    pub fn catalog(&self) -> &ObjectCatalog {
        &self.catalog
    }

    pub fn node_of(&self, identity: &Identity) -> Option<NodeId> {
        self.lookup.get(identity).copied()
    }

    pub fn node_of_source(&self, local_id: &str) -> Option<NodeId> {
        self.node_of(&Identity::source(local_id))
    }

    pub fn node_of_target(&self, local_id: &str) -> Option<NodeId> {
        self.node_of(&Identity::target(local_id))
    }

    /// All identities of one side, in node order, paired with their node.
    pub fn identities(&self, side: Side) -> Vec<(&Identity, NodeId)> {
        self.nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.identities.iter().map(move |id| (id, NodeId(i))))
            .filter(|(id, _)| id.side == side)
            .collect()
    }

    pub fn factoids_with(&self, predicate: Predicate) -> impl Iterator<Item = &Factoid> + '_ {
        self.factoids.iter().filter(move |f| f.predicate == predicate)
    }

    /// Out-degree of every node over `follows` factoids.
    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for f in self.factoids_with(Predicate::Follows) {
            deg[f.subject.0] += 1;
        }
        deg
    }
}

/// Builds the unified network. Source users get node ids first, each side in
/// input order.
pub fn build_unified_network(source: &SocialNetwork, target: &SocialNetwork) -> Result<UnifiedNetwork> {
    let mut nodes = Vec::with_capacity(source.users.len() + target.users.len());
    let mut factoids = Vec::new();
    let mut catalog = CatalogBuilder::default();
    let mut lookup = HashMap::new();

    for (side, net) in [(Side::Source, source), (Side::Target, target)] {
        let base = nodes.len();
        for (i, user) in net.users.iter().enumerate() {
            let identity = Identity::new(side, user.local_id.clone());
            let node = NodeId(base + i);
            if lookup.insert(identity.clone(), node).is_some() {
                return Err(Error::DuplicateId {
                    network: net.network_id.clone(),
                    id: user.local_id.clone(),
                });
            }
            nodes.push(UserNode {
                identities: vec![identity],
            });
            for (&attribute, value) in &user.attributes {
                let idx = catalog.intern(attribute, value)?;
                factoids.push(Factoid {
                    subject: node,
                    predicate: Predicate::Has(attribute),
                    object: FactoidObject::Object(idx),
                });
            }
        }
        for (from, to) in &net.edges {
            let resolve = |id: &String| {
                lookup
                    .get(&Identity::new(side, id.clone()))
                    .copied()
                    .ok_or_else(|| Error::DanglingEdge {
                        network: net.network_id.clone(),
                        from: from.clone(),
                        to: to.clone(),
                        missing: id.clone(),
                    })
            };
            factoids.push(Factoid {
                subject: resolve(from)?,
                predicate: Predicate::Follows,
                object: FactoidObject::User(resolve(to)?),
            });
        }
    }

    Ok(UnifiedNetwork {
        source_label: source.network_id.clone(),
        target_label: target.network_id.clone(),
        nodes,
        factoids,
        catalog: ObjectCatalog::from_parts(catalog.objects),
        lookup,
    })
}

/// Collapses each `(source id, target id)` anchor pair into one node. The
/// merged node keeps the source node's position; ids are then re-packed
/// densely and duplicate factoids removed.
pub fn merge_anchor_pairs(net: &UnifiedNetwork, anchors: &[(String, String)]) -> Result<UnifiedNetwork> {
    // absorbed target node -> surviving node (both old ids)
    let mut absorb: HashMap<NodeId, NodeId> = HashMap::new();
    let mut used: HashMap<NodeId, (NodeId, NodeId)> = HashMap::new();
    for (s, t) in anchors {
        let ns = net
            .node_of_source(s)
            .ok_or_else(|| Error::UnknownId(Identity::source(s.clone()).qualified()))?;
        let nt = net
            .node_of_target(t)
            .ok_or_else(|| Error::UnknownId(Identity::target(t.clone()).qualified()))?;
        if ns == nt {
            continue;
        }
        for (node, label) in [(ns, s), (nt, t)] {
            if net.node(node).identities.len() > 1 {
                return Err(Error::ConflictingAnchor(label.clone()));
            }
            if let Some(&pair) = used.get(&node) {
                if pair != (ns, nt) {
                    return Err(Error::ConflictingAnchor(label.clone()));
                }
            }
        }
        used.insert(ns, (ns, nt));
        used.insert(nt, (ns, nt));
        absorb.insert(nt, ns);
    }
    if absorb.is_empty() {
        return Ok(net.clone());
    }

    let mut remap = vec![NodeId(usize::MAX); net.nodes.len()];
    let mut nodes: Vec<UserNode> = Vec::with_capacity(net.nodes.len() - absorb.len());
    for (i, node) in net.nodes.iter().enumerate() {
        if !absorb.contains_key(&NodeId(i)) {
            remap[i] = NodeId(nodes.len());
            nodes.push(node.clone());
        }
    }
    let mut absorbed: Vec<_> = absorb.into_iter().collect();
    absorbed.sort();
    for (gone, keep) in absorbed {
        let new_id = remap[keep.0];
        remap[gone.0] = new_id;
        nodes[new_id.0]
            .identities
            .extend(net.nodes[gone.0].identities.iter().cloned());
    }

    let mut seen = HashSet::with_capacity(net.factoids.len());
    let factoids = net
        .factoids
        .iter()
        .map(|f| Factoid {
            subject: remap[f.subject.0],
            predicate: f.predicate,
            object: match f.object {
                FactoidObject::User(u) => FactoidObject::User(remap[u.0]),
                obj => obj,
            },
        })
        .filter(|f| seen.insert(*f))
        .collect();

    UnifiedNetwork::from_parts(
        net.source_label.clone(),
        net.target_label.clone(),
        nodes,
        factoids,
        net.catalog.clone(),
    )
}
