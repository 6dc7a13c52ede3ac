use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use phylogeo_core::cost::{CostMode, CostModel, GeoCoordinate, Sample};
use phylogeo_core::io::write_edges_tsv;
use phylogeo_core::pipeline::infer;
use phylogeo_core::{CountMatrix, Error, RandomWalk};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Per-site reversible substitution model.
#[pyclass(frozen, name = "SiteModel")]
struct SiteModel {
    inner: phylogeo_core::SiteModel,
}

#[pymethods]
impl SiteModel {
    #[staticmethod]
    #[pyo3(signature = (mu=1.0))]
    fn jc69(mu: f64) -> PyResult<Self> {
        Ok(SiteModel {
            inner: phylogeo_core::SiteModel::jc69(mu).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (mu=1.0))]
    fn binary(mu: f64) -> PyResult<Self> {
        Ok(SiteModel {
            inner: phylogeo_core::SiteModel::binary(mu).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn gtr(pi: Vec<f64>, exchange: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(SiteModel {
            inner: phylogeo_core::SiteModel::gtr(pi, exchange).map_err(py_err)?,
        })
    }

    #[getter]
    fn alphabet(&self) -> String {
        String::from_utf8_lossy(self.inner.alphabet().symbols()).into_owned()
    }

    fn stationary(&self) -> Vec<f64> {
        self.inner.stationary()
    }

    fn transition_prob(&self, a: usize, b: usize, t: f64) -> PyResult<f64> {
        self.inner.transition_prob(a, b, t).map_err(py_err)
    }

    /// `-sum log pi(x_i)` of a sequence string.
    fn node_cost(&self, seq: &str) -> PyResult<f64> {
        let x = self.encode(seq)?;
        self.inner.node_cost(&x).map_err(py_err)
    }

    /// `(cost, t_star)` with `cost = -log sup_t P^t(x, y)`.
    fn edge_cost(&self, x: &str, y: &str) -> PyResult<(f64, f64)> {
        let (x, y) = (self.encode(x)?, self.encode(y)?);
        let counts =
            CountMatrix::from_sequences(&x, &y, self.inner.alphabet_size()).map_err(py_err)?;
        let s = self.inner.sup_seq_loglik(&counts).map_err(py_err)?;
        Ok((s.cost, s.t_star))
    }

    fn __repr__(&self) -> String {
        format!("SiteModel({})", self.inner)
    }
}

impl SiteModel {
    fn encode(&self, s: &str) -> PyResult<Vec<u8>> {
        self.inner.alphabet().encode_str(s).map_err(|(pos, c)| {
            PyValueError::new_err(format!("symbol `{c}` at position {} is not in the alphabet", pos + 1))
        })
    }
}

/// Random walk on a weighted undirected graph.
#[pyclass(frozen, name = "GeoGraph")]
struct GeoGraph {
    walk: RandomWalk,
}

#[pymethods]
impl GeoGraph {
    #[new]
    fn new(edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let graph = phylogeo_core::GeoGraph::from_edges(edges).map_err(py_err)?;
        Ok(GeoGraph {
            walk: RandomWalk::new(graph).map_err(py_err)?,
        })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.walk.graph().node_count()
    }

    #[getter]
    fn stationary(&self) -> Vec<f64> {
        self.walk.pi().to_vec()
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.walk.spectral().lambda
    }

    /// `max(max_{t < t'} P^t(x, y), pi(y))`.
    fn sup_additive(&self, x: usize, y: usize, eps1: f64) -> PyResult<f64> {
        Ok(self.walk.sup_rw_additive(x, y, eps1).map_err(py_err)?.value)
    }
}

/// Spanning-tree inference over the samples; returns newick, edges and
/// both tree costs.
#[pyfunction]
#[pyo3(signature = (ids, sequences, model, locations=None, graph=None, mode="independent", eps=0.1, root=None))]
#[allow(clippy::too_many_arguments)]
fn infer_tree<'py>(
    py: Python<'py>,
    ids: Vec<String>,
    sequences: Vec<String>,
    model: &SiteModel,
    locations: Option<Vec<usize>>,
    graph: Option<&GeoGraph>,
    mode: &str,
    eps: f64,
    root: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    if ids.len() != sequences.len() {
        return Err(PyValueError::new_err("ids and sequences differ in length"));
    }
    if locations.is_some() != graph.is_some() {
        return Err(PyValueError::new_err("locations and graph must be given together"));
    }
    let mode: CostMode = mode.parse().map_err(py_err)?;
    let mut samples = Vec::with_capacity(ids.len());
    for (i, (id, seq)) in ids.into_iter().zip(&sequences).enumerate() {
        let loc = match &locations {
            Some(l) => match l.get(i) {
                Some(&v) => Some(v),
                None => return Err(PyValueError::new_err("locations must cover every sample")),
            },
            None => None,
        };
        samples.push(Sample::new(id, model.encode(seq)?, loc));
    }
    let geo = match graph {
        Some(g) => Some(GeoCoordinate::estimated(g.walk.clone(), eps).map_err(py_err)?),
        None => None,
    };
    let cost_model = CostModel::new(model.inner.clone(), geo, mode);
    let result = py
        .detach(|| infer(&samples, &cost_model, root))
        .map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("newick", result.tree.to_newick())?;
    let ids = result.costs.ids();
    let edges: Vec<(String, String, f64, f64)> = result
        .tree
        .edges()
        .into_iter()
        .map(|(p, c)| (ids[p].clone(), ids[c].clone(), result.costs.weight(p, c), result.costs.phi(p, c)))
        .collect();
    out.set_item("edges", edges)?;
    out.set_item("edges_tsv", write_edges_tsv(&result.tree, &result.costs))?;
    out.set_item("total_w", result.total_w)?;
    out.set_item("tree_cost_directed", result.tree_cost_directed)?;
    out.set_item("tree_cost_symmetric", result.tree_cost_symmetric)?;
    Ok(out)
}

/// Samples from a random tree; returns leaf ids, sequences, locations and
/// the truth JSON.
#[pyfunction]
#[pyo3(signature = (k, n, model, graph=None, durations=(0.1, 1.0), seed=0))]
fn simulate<'py>(
    py: Python<'py>,
    k: usize,
    n: usize,
    model: &SiteModel,
    graph: Option<&GeoGraph>,
    durations: (f64, f64),
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let sim = phylogeo_core::synth::simulate(k, n, &model.inner, graph.map(|g| &g.walk), durations, seed)
        .map_err(py_err)?;
    let alphabet = model.inner.alphabet();
    let leaves = sim.leaves();
    let out = PyDict::new(py);
    out.set_item("ids", leaves.iter().map(|s| s.id.clone()).collect::<Vec<_>>())?;
    out.set_item(
        "sequences",
        leaves.iter().map(|s| alphabet.decode_seq(&s.sequence)).collect::<Vec<_>>(),
    )?;
    if graph.is_some() {
        out.set_item("locations", leaves.iter().map(|s| s.location.unwrap_or(0)).collect::<Vec<_>>())?;
    }
    out.set_item("truth_json", sim.truth.to_json())?;
    Ok(out)
}

#[pymodule]
fn phylogeo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SiteModel>()?;
    m.add_class::<GeoGraph>()?;
    m.add_function(wrap_pyfunction!(infer_tree, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
