use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize};

use super::{Attribute, AttributeObject, SocialNetwork, UserRecord};
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUser {
    id: String,
    #[serde(default)]
    attrs: RawAttrs,
}

#[derive(Default)]
struct RawAttrs(BTreeMap<Attribute, AttributeObject>);

impl<'de> Deserialize<'de> for RawAttrs {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct AttrsVisitor;

        impl<'de> Visitor<'de> for AttrsVisitor {
            type Value = RawAttrs;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of attributes")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<RawAttrs, A::Error> {
                let mut out = BTreeMap::new();
                while let Some(key) = map.next_key::<String>()? {
                    let attribute = Attribute::from_key(&key)
                        .ok_or_else(|| de::Error::custom(format!("unknown attribute {key:?}")))?;
                    let value = if attribute.is_text() {
                        AttributeObject::Text(map.next_value()?)
                    } else {
                        AttributeObject::Vector(map.next_value()?)
                    };
                    if out.insert(attribute, value).is_some() {
                        return Err(de::Error::custom(format!("attribute {key:?} given twice")));
                    }
                }
                Ok(RawAttrs(out))
            }
        }

        d.deserialize_map(AttrsVisitor)
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Parses a users JSONL stream. `path` is only used in error messages.
pub fn parse_users_jsonl(reader: impl BufRead, path: &Path) -> Result<Vec<UserRecord>> {
    let mut users = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawUser = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            msg: e.to_string(),
        })?;
        users.push(UserRecord {
            local_id: raw.id,
            attributes: raw.attrs.0,
        });
    }
    Ok(users)
}

pub fn load_users(path: &Path) -> Result<Vec<UserRecord>> {
    parse_users_jsonl(open(path)?, path)
}

fn parse_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match fields.as_slice() {
            [a, b] if !a.is_empty() && !b.is_empty() => pairs.push((a.to_string(), b.to_string())),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    msg: format!("expected two comma-separated ids, got {line:?}"),
                })
            }
        }
    }
    Ok(pairs)
}

/// Reads a headerless `follower_id,followee_id` CSV.
pub fn load_edges(path: &Path) -> Result<Vec<(String, String)>> {
    parse_pairs(path)
}

/// Reads a headerless `source_id,target_id` CSV.
pub fn load_anchors(path: &Path) -> Result<Vec<(String, String)>> {
    parse_pairs(path)
}

/// Loads and validates one network from a users JSONL file and an optional
/// edges CSV.
pub fn load_network(
    users_path: &Path,
    edges_path: Option<&Path>,
    network_id: &str,
) -> Result<SocialNetwork> {
    let users = load_users(users_path)?;
    let edges = match edges_path {
        Some(p) => load_edges(p)?,
        None => Vec::new(),
    };
    SocialNetwork::new(network_id, users, edges)
}

#[derive(Serialize)]
struct UserLine<'a> {
    id: &'a str,
    attrs: BTreeMap<&'static str, &'a AttributeObject>,
}

/// Writes users in the JSONL format read by [`load_users`].
pub fn write_users_jsonl(users: &[UserRecord], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for u in users {
        let line = UserLine {
            id: &u.local_id,
            attrs: u.attributes.iter().map(|(a, v)| (a.key(), v)).collect(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Writes headerless `a,b` rows, the format of edge and anchor files.
pub fn write_pairs_csv(pairs: &[(String, String)], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (a, b) in pairs {
        writeln!(out, "{a},{b}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
