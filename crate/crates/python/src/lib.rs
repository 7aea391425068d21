//! Python bindings: networks, synthetic data, the full linkage pipeline and
//! the evaluation helpers.

use std::collections::BTreeMap;
use std::path::PathBuf;

use factoidlink_core::eval::{self, GroundTruth, Metrics, RankingResult, SynthConfig};
use factoidlink_core::model::{self, write_pairs_csv, Attribute, AttributeObject, UserRecord};
use factoidlink_core::pipeline::{run_networks, NetworkInput, PipelineConfig};
use factoidlink_core::{similarity, EmbeddingTable, Error};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_attribute(name: &str) -> PyResult<Attribute> {
    Attribute::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown attribute {name:?}")))
}

#[pyfunction]
fn jaro_winkler(a: &str, b: &str) -> f64 {
    similarity::jaro_winkler(a, b)
}

/// Case-insensitive Jaro-Winkler mapped onto `[-1, 1]`.
#[pyfunction]
fn text_similarity(a: &str, b: &str) -> f64 {
    similarity::text_similarity(a, b)
}

#[pyfunction]
fn cosine_similarity(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    similarity::cosine_similarity(&x, &y).map_err(to_py)
}

/// A validated social network.
///
/// `users` is a list of dicts `{"id": str, "attrs": {attribute: value}}`,
/// where text attributes take a string and `image_features` a list of floats.
#[pyclass(name = "SocialNetwork", module = "factoidlink", skip_from_py_object)]
struct PyNetwork {
    inner: model::SocialNetwork,
}

fn user_from_dict(d: &Bound<'_, PyDict>) -> PyResult<UserRecord> {
    let id: String = d
        .get_item("id")?
        .ok_or_else(|| PyValueError::new_err("user dict needs an \"id\""))?
        .extract()?;
    let mut user = UserRecord::new(id);
    if let Some(attrs) = d.get_item("attrs")? {
        let attrs = attrs.cast::<PyDict>()?;
        for (key, value) in attrs.iter() {
            let key: String = key.extract()?;
            let attribute = Attribute::from_key(&key)
                .ok_or_else(|| PyValueError::new_err(format!("unknown attribute {key:?}")))?;
            let value = if attribute.is_text() {
                AttributeObject::Text(value.extract()?)
            } else {
                AttributeObject::Vector(value.extract()?)
            };
            user = user.with(attribute, value);
        }
    }
    Ok(user)
}

#[pymethods]
impl PyNetwork {
    #[new]
    #[pyo3(signature = (network_id, users, edges = Vec::new()))]
    fn new(network_id: String, users: &Bound<'_, PyList>, edges: Vec<(String, String)>) -> PyResult<Self> {
        let users = users
            .iter()
            .map(|u| user_from_dict(u.cast::<PyDict>()?))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = model::SocialNetwork::new(network_id, users, edges).map_err(to_py)?;
        Ok(PyNetwork { inner })
    }

    /// Reads a users JSONL file and an optional `follower,followee` CSV.
    #[staticmethod]
    #[pyo3(signature = (network_id, users_path, edges_path = None, undirected = false))]
    fn load(network_id: &str, users_path: PathBuf, edges_path: Option<PathBuf>, undirected: bool) -> PyResult<Self> {
        let input = NetworkInput {
            users: users_path,
            edges: edges_path,
            undirected,
        };
        Ok(PyNetwork {
            inner: input.load(network_id).map_err(to_py)?,
        })
    }

    #[getter]
    fn network_id(&self) -> &str {
        &self.inner.network_id
    }

    #[getter]
    fn user_ids(&self) -> Vec<String> {
        self.inner.users.iter().map(|u| u.local_id.clone()).collect()
    }

    #[getter]
    fn edges(&self) -> Vec<(String, String)> {
        self.inner.edges.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.users.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "SocialNetwork({:?}, {} users, {} edges)",
            self.inner.network_id,
            self.inner.users.len(),
            self.inner.edges.len()
        )
    }
}

type SyntheticTriple = (PyNetwork, PyNetwork, Vec<(String, String)>);

/// Two overlapping synthetic networks and their true `(source, target)` pairs.
#[pyfunction]
#[pyo3(signature = (n_users = 200, mean_degree = 8.0, overlap = 0.8, name_noise = 0.3, feature_dim = 32, seed = 0))]
fn synthetic_pair(
    n_users: usize,
    mean_degree: f64,
    overlap: f64,
    name_noise: f64,
    feature_dim: usize,
    seed: u64,
) -> PyResult<SyntheticTriple> {
    let cfg = SynthConfig {
        n_users,
        edge_prob: SynthConfig::with_mean_degree(n_users, mean_degree),
        overlap_frac: overlap,
        name_noise,
        feature_dim,
        seed,
    };
    let pair = eval::generate_synthetic_pair(&cfg).map_err(to_py)?;
    Ok((
        PyNetwork { inner: pair.source },
        PyNetwork { inner: pair.target },
        pair.truth.pairs().to_vec(),
    ))
}

fn metrics_dict<'py>(py: Python<'py>, m: &Metrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("hr", m.hr.clone())?;
    d.set_item("mrr", m.mrr)?;
    d.set_item("n_pairs", m.n_pairs)?;
    d.set_item("n_missing", m.n_missing)?;
    Ok(d)
}

fn rankings_map(rankings: &[RankingResult]) -> BTreeMap<String, Vec<(String, f64)>> {
    rankings
        .iter()
        .map(|r| (r.source_id.clone(), r.candidates.clone()))
        .collect()
}

/// Output of [`link`]: rankings, optional metrics and the account vectors.
#[pyclass(name = "LinkResult", module = "factoidlink", skip_from_py_object)]
struct PyLinkResult {
    rankings: Vec<RankingResult>,
    metrics: Option<Metrics>,
    baselines: BTreeMap<Attribute, Metrics>,
    accounts: EmbeddingTable,
}

#[pymethods]
impl PyLinkResult {
    /// `{source_id: [(target_id, score), ...]}`, best first.
    #[getter]
    fn rankings(&self) -> BTreeMap<String, Vec<(String, f64)>> {
        rankings_map(&self.rankings)
    }

    #[getter]
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        self.metrics.as_ref().map(|m| metrics_dict(py, m)).transpose()
    }

    /// Name-baseline metrics keyed by attribute, when truth was given.
    #[getter]
    fn baselines<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (a, m) in &self.baselines {
            d.set_item(a.key(), metrics_dict(py, m)?)?;
        }
        Ok(d)
    }

    /// Account ids of the embedding table, e.g. `"src:alice"`.
    #[getter]
    fn account_ids(&self) -> Vec<String> {
        self.accounts.ids().to_vec()
    }

    fn embedding(&self, account_id: &str) -> PyResult<Vec<f64>> {
        let i = self
            .accounts
            .ids()
            .iter()
            .position(|id| id == account_id)
            .ok_or_else(|| PyValueError::new_err(format!("unknown account {account_id:?}")))?;
        Ok(self.accounts.row(i).to_vec())
    }
}

/// Runs the whole pipeline on two networks, writing artifacts to `out_dir`.
#[pyfunction]
#[pyo3(signature = (
    source, target, out_dir, *, predicates = None, dim = None, epochs = None,
    negatives = None, seed = 0, anchors = None, truth = None, top_k = 30,
))]
#[allow(clippy::too_many_arguments)]
fn link(
    py: Python<'_>,
    source: &PyNetwork,
    target: &PyNetwork,
    out_dir: PathBuf,
    predicates: Option<Vec<String>>,
    dim: Option<usize>,
    epochs: Option<usize>,
    negatives: Option<usize>,
    seed: u64,
    anchors: Option<Vec<(String, String)>>,
    truth: Option<Vec<(String, String)>>,
    top_k: usize,
) -> PyResult<PyLinkResult> {
    let unused = NetworkInput {
        users: PathBuf::new(),
        edges: None,
        undirected: false,
    };
    let mut cfg = PipelineConfig::new(unused.clone(), unused, &out_dir);
    if let Some(p) = predicates {
        cfg.predicates = p.iter().map(|a| parse_attribute(a)).collect::<PyResult<_>>()?;
    }
    cfg.factoid.dim = dim.unwrap_or(cfg.factoid.dim);
    cfg.factoid.epochs = epochs.unwrap_or(cfg.factoid.epochs);
    cfg.factoid.negatives = negatives.unwrap_or(cfg.factoid.negatives);
    cfg.top_k = top_k;
    cfg.seed = seed;
    let truth = truth.map(GroundTruth::new).transpose().map_err(to_py)?;
    let (s, t) = (source.inner.clone(), target.inner.clone());

    let out = py
        .detach(|| {
            if let Some(anchors) = anchors {
                std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
                let path = out_dir.join("anchors.csv");
                write_pairs_csv(&anchors, &path)?;
                cfg.anchors = Some(path);
            }
            run_networks(&cfg, s, t, truth.as_ref())
        })
        .map_err(to_py)?;
    Ok(PyLinkResult {
        rankings: out.rankings,
        metrics: out.metrics,
        baselines: out.baselines,
        accounts: out.accounts,
    })
}

/// Hit rates and MRR of `rankings` (`{source_id: [target_id, ...]}` best
/// first, or `[(target_id, score), ...]`) against true pairs.
#[pyfunction]
fn compute_metrics<'py>(
    py: Python<'py>,
    rankings: BTreeMap<String, Vec<Bound<'py, PyAny>>>,
    truth: Vec<(String, String)>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut parsed = Vec::with_capacity(rankings.len());
    for (source_id, items) in rankings {
        let n = items.len();
        let candidates = items
            .iter()
            .enumerate()
            .map(|(rank, item)| match item.extract::<(String, f64)>() {
                Ok(pair) => Ok(pair),
                Err(_) => Ok((item.extract::<String>()?, (n - rank) as f64)),
            })
            .collect::<PyResult<Vec<_>>>()?;
        parsed.push(RankingResult { source_id, candidates });
    }
    let truth = GroundTruth::new(truth).map_err(to_py)?;
    let m = eval::compute_metrics(&parsed, &truth).map_err(to_py)?;
    metrics_dict(py, &m)
}

/// Rankings by Jaro-Winkler similarity of one name attribute alone.
#[pyfunction]
#[pyo3(signature = (source, target, attribute = "username"))]
fn name_baseline(
    source: &PyNetwork,
    target: &PyNetwork,
    attribute: &str,
) -> PyResult<BTreeMap<String, Vec<(String, f64)>>> {
    let attribute = parse_attribute(attribute)?;
    if !attribute.is_text() {
        return Err(PyValueError::new_err("the name baseline needs a text attribute"));
    }
    Ok(rankings_map(&eval::name_baseline(&source.inner, &target.inner, attribute)))
}

#[pymodule]
fn factoidlink(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyLinkResult>()?;
    m.add_function(wrap_pyfunction!(jaro_winkler, m)?)?;
    m.add_function(wrap_pyfunction!(text_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_pair, m)?)?;
    m.add_function(wrap_pyfunction!(link, m)?)?;
    m.add_function(wrap_pyfunction!(compute_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(name_baseline, m)?)?;
    Ok(())
}
