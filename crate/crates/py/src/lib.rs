//! Python bindings for `gli_core`.
//!
//! Arrays cross the boundary as NumPy arrays built with `numpy.frombuffer`
//! over the tensor bytes, so dtypes are preserved exactly. Reports cross as
//! the core's JSON serialization decoded with the `json` module, which keeps
//! every float bit-identical to the CLI output. All core work runs with the
//! interpreter lock released.

use std::path::PathBuf;

use gli_core::metrics::{compute_all, dataset_graph, ApproxBudget};
use gli_core::task::TaskType;
use gli_core::tensor::{DenseArray, Tensor};
use gli_core::validate::validate_dataset;
use gli_core::view::{get_dataset as core_get_dataset, DatasetView};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

create_exception!(gli, GliError, PyException, "Error raised by the gli core; the message starts with the error code.");

fn gli_error(code: &str, message: impl std::fmt::Display) -> PyErr {
    GliError::new_err(format!("{code}: {message}"))
}

fn ndarray<'py>(py: Python<'py>, bytes: &[u8], descr: &str, shape: &[usize]) -> PyResult<Bound<'py, PyAny>> {
    let numpy = py.import("numpy")?;
    let flat = numpy.call_method1("frombuffer", (PyBytes::new(py, bytes), descr))?;
    flat.call_method1("reshape", (shape.to_vec(),))
}

fn dense<'py>(py: Python<'py>, a: &DenseArray) -> PyResult<Bound<'py, PyAny>> {
    ndarray(py, a.as_bytes(), a.dtype().descr(), a.shape())
}

/// A dense tensor becomes an array. A sparse one becomes a dict with a
/// `format` key ("csr" or "coo") and one array per stored component.
fn tensor<'py>(py: Python<'py>, t: &Tensor) -> PyResult<Bound<'py, PyAny>> {
    match t {
        Tensor::Dense(a) => dense(py, a),
        Tensor::Sparse(m) => {
            let d = PyDict::new(py);
            d.set_item("format", if m.is_csr() { "csr" } else { "coo" })?;
            for (name, a) in m.components() {
                d.set_item(name, dense(py, &a)?)?;
            }
            Ok(d.into_any())
        }
    }
}

fn mask<'py>(py: Python<'py>, m: &[bool]) -> PyResult<Bound<'py, PyAny>> {
    let bytes: Vec<u8> = m.iter().map(|&b| u8::from(b)).collect();
    ndarray(py, &bytes, "|b1", &[m.len()])
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// One graph combined with one task, as NumPy arrays.
#[pyclass(module = "gli", frozen)]
pub struct BridgeDataset {
    #[pyo3(get)]
    task_type: String,
    #[pyo3(get)]
    num_entities: usize,
    /// Feature attribute path ("Node/NodeFeature") to array.
    #[pyo3(get)]
    features: Py<PyDict>,
    /// Global `(src, dst)` ids, shape `(2, M)`, int64.
    #[pyo3(get)]
    edge_index: Py<PyAny>,
    #[pyo3(get)]
    target: Option<Py<PyAny>>,
    #[pyo3(get)]
    train_mask: Py<PyAny>,
    #[pyo3(get)]
    val_mask: Py<PyAny>,
    #[pyo3(get)]
    test_mask: Py<PyAny>,
}

impl BridgeDataset {
    fn from_view(py: Python<'_>, view: &DatasetView) -> PyResult<Self> {
        let features = PyDict::new(py);
        for (path, t) in view.features() {
            features.set_item(path.to_string(), tensor(py, t)?)?;
        }
        let edges = view.edge_index();
        let ids: Vec<i64> = edges.iter().map(|e| e.0 as i64).chain(edges.iter().map(|e| e.1 as i64)).collect();
        let edge_index = dense(py, &DenseArray::from_vec(vec![2, edges.len()], ids).expect("two rows of M ids"))?;
        let masks = view.masks();
        Ok(BridgeDataset {
            task_type: view.task().task_type.to_string(),
            num_entities: view.num_entities(),
            features: features.unbind(),
            edge_index: edge_index.unbind(),
            target: view.target().map(|t| tensor(py, t).map(Bound::unbind)).transpose()?,
            train_mask: mask(py, &masks.train)?.unbind(),
            val_mask: mask(py, &masks.val)?.unbind(),
            test_mask: mask(py, &masks.test)?.unbind(),
        })
    }
}

#[pymethods]
impl BridgeDataset {
    fn __repr__(&self) -> String {
        format!("BridgeDataset(task_type={:?}, num_entities={})", self.task_type, self.num_entities)
    }
}

/// Loads dataset `name` under `root` for the task of type `task_type`.
#[pyfunction]
fn get_dataset(py: Python<'_>, root: PathBuf, name: &str, task_type: &str) -> PyResult<BridgeDataset> {
    let task_type: TaskType = task_type.parse().map_err(|e| gli_error("UnknownTaskType", e))?;
    let view = py
        .detach(|| core_get_dataset(&root, name, task_type))
        .map_err(|e| gli_error(e.code(), e))?;
    BridgeDataset::from_view(py, &view)
}

/// Validates a dataset directory. Returns the report as a dict with
/// `passed` and `findings`.
#[pyfunction]
fn validate(py: Python<'_>, dir: PathBuf) -> PyResult<Bound<'_, PyAny>> {
    let report = py
        .detach(|| validate_dataset(&dir))
        .map_err(|e| gli_error("IoError", format!("{}: {e}", dir.display())))?;
    json_loads(py, &report.to_json())
}

/// Computes every graph property of a dataset. Keyword arguments override
/// the approximation budget.
#[pyfunction]
#[pyo3(signature = (dir, *, exact_n=None, exact_pairs=None, bfs_sources=None, sample_pairs=None, seed=None))]
fn metrics(
    py: Python<'_>,
    dir: PathBuf,
    exact_n: Option<usize>,
    exact_pairs: Option<usize>,
    bfs_sources: Option<usize>,
    sample_pairs: Option<usize>,
    seed: Option<u64>,
) -> PyResult<Bound<'_, PyAny>> {
    let d = ApproxBudget::default();
    let budget = ApproxBudget {
        exact_n: exact_n.unwrap_or(d.exact_n),
        exact_pairs: exact_pairs.unwrap_or(d.exact_pairs),
        bfs_sources: bfs_sources.unwrap_or(d.bfs_sources),
        sample_pairs: sample_pairs.unwrap_or(d.sample_pairs),
        seed: seed.unwrap_or(d.seed),
    };
    let text = py
        .detach(|| dataset_graph(&dir).map(|g| compute_all(&g, &budget).without_timings().to_json()))
        .map_err(|e| gli_error(e.code(), e))?;
    json_loads(py, &text)
}

#[pymodule]
fn gli(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GliError", m.py().get_type::<GliError>())?;
    m.add_class::<BridgeDataset>()?;
    m.add_function(wrap_pyfunction!(get_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    Ok(())
}
