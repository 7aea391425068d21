//! Dense embedding tables and their text format:
//! a `m=<dim> n=<rows>` header, then one `id v_1 ... v_m` line per row.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    ids: Vec<String>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, ids: Vec<String>, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        if data.len() != dim * ids.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * ids.len(),
                found: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Divergence {
                stage: "embedding".into(),
                detail: "non-finite embedding entry".into(),
            });
        }
        Ok(EmbeddingTable { dim, ids, data })
    }

    pub fn zeros(dim: usize, ids: Vec<String>) -> Self {
        let data = vec![0.0; dim * ids.len()];
        EmbeddingTable { dim, ids, data }
    }

    /// Rows drawn uniformly from `[-half_width, half_width]`.
    pub fn uniform(dim: usize, ids: Vec<String>, half_width: f64, rng: &mut impl Rng) -> Self {
        let data = (0..dim * ids.len())
            .map(|_| rng.random_range(-half_width..=half_width))
            .collect();
        EmbeddingTable { dim, ids, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.ids.iter().map(String::as_str).zip(self.data.chunks_exact(self.dim))
    }

    pub fn index(&self) -> HashMap<&str, usize> {
        self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "m={} n={}", self.dim, self.len()).map_err(io)?;
        let mut line = String::new();
        for (id, row) in self.rows() {
            line.clear();
            line.push_str(id);
            for x in row {
                // Display prints the shortest string that parses back to the same f64
                write!(line, " {x}").expect("writing to a String");
            }
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let parse_err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .transpose()
            .map_err(|e| Error::io(path, e))?
            .ok_or_else(|| parse_err(1, "empty file".into()))?;
        let (dim, n) = parse_header(&header).ok_or_else(|| parse_err(1, format!("bad header {header:?}")))?;

        let mut ids = Vec::with_capacity(n);
        let mut data = Vec::with_capacity(n * dim);
        for (k, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let id = fields.next().ok_or_else(|| parse_err(k + 2, "missing id".into()))?;
            let start = data.len();
            for f in fields {
                data.push(f.parse::<f64>().map_err(|e| parse_err(k + 2, format!("{f:?}: {e}")))?);
            }
            if data.len() - start != dim {
                return Err(parse_err(k + 2, format!("expected {dim} values, got {}", data.len() - start)));
            }
            ids.push(id.to_string());
        }
        if ids.len() != n {
            return Err(parse_err(1, format!("header declares {n} rows, found {}", ids.len())));
        }
        EmbeddingTable::new(dim, ids, data)
    }
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut dim = None;
    let mut n = None;
    for field in line.split_whitespace() {
        match field.split_once('=')? {
            ("m", v) => dim = v.parse().ok(),
            ("n", v) => n = v.parse().ok(),
            _ => return None,
        }
    }
    Some((dim?, n?))
}
