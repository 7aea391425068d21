//! JSONL snapshot of a unified network: one header line, then nodes, catalog
//! objects and factoids, one per line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Attribute, AttributeObject, Factoid, FactoidObject, Identity, ObjectCatalog, Predicate, UnifiedNetwork, UserNode};
use crate::error::{Error, Result};

const FORMAT: &str = "factoidlink-unified";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header {
        format: String,
        version: u32,
        source: String,
        target: String,
        nodes: usize,
        factoids: usize,
    },
    Node {
        id: usize,
        identities: Vec<Identity>,
    },
    Object {
        attribute: Attribute,
        index: usize,
        value: AttributeObject,
    },
    Factoid {
        subject: usize,
        predicate: Predicate,
        #[serde(flatten)]
        object: FactoidObject,
    },
}

pub fn write_snapshot(net: &UnifiedNetwork, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut emit = |line: &Line| -> Result<()> {
        serde_json::to_writer(&mut out, line)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))
    };
    emit(&Line::Header {
        format: FORMAT.to_string(),
        version: VERSION,
        source: net.source_label.clone(),
        target: net.target_label.clone(),
        nodes: net.node_count(),
        factoids: net.factoids().len(),
    })?;
    for (id, node) in net.nodes().iter().enumerate() {
        emit(&Line::Node {
            id,
            identities: node.identities.clone(),
        })?;
    }
    for attribute in net.catalog().attributes() {
        for (index, value) in net.catalog().objects(attribute).iter().enumerate() {
            emit(&Line::Object {
                attribute,
                index,
                value: value.clone(),
            })?;
        }
    }
    for f in net.factoids() {
        emit(&Line::Factoid {
            subject: f.subject.0,
            predicate: f.predicate,
            object: f.object,
        })?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<UnifiedNetwork> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut labels = None;
    let mut nodes = Vec::new();
    let mut objects: BTreeMap<Attribute, Vec<AttributeObject>> = BTreeMap::new();
    let mut factoids = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line).map_err(|e| parse_err(n + 1, e.to_string()))?;
        match parsed {
            Line::Header {
                format,
                version,
                source,
                target,
                ..
            } => {
                if format != FORMAT || version != VERSION {
                    return Err(parse_err(n + 1, format!("unsupported snapshot {format} v{version}")));
                }
                labels = Some((source, target));
            }
            Line::Node { id, identities } => {
                if id != nodes.len() {
                    return Err(parse_err(n + 1, format!("node {id} out of order")));
                }
                nodes.push(UserNode { identities });
            }
            Line::Object {
                attribute,
                index,
                value,
            } => {
                let list = objects.entry(attribute).or_default();
                if index != list.len() {
                    return Err(parse_err(n + 1, format!("object {index} out of order")));
                }
                list.push(value);
            }
            Line::Factoid {
                subject,
                predicate,
                object,
            } => factoids.push(Factoid {
                subject: super::NodeId(subject),
                predicate,
                object,
            }),
        }
    }
    let (source, target) = labels.ok_or_else(|| parse_err(1, "missing header".to_string()))?;
    UnifiedNetwork::from_parts(source, target, nodes, factoids, ObjectCatalog::from_parts(objects))
}
