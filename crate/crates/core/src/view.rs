//! Task-ready datasets: one graph combined with one task.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::graph::{load_graph, AttrPath, GraphError, GraphStorage, Level};
use crate::task::{load_task, parse_task, resolve_splits, EntityKind, SplitMasks, TaskConfig, TaskError, TaskType};
use crate::tensor::Tensor;

#[derive(Debug, thiserror::Error)]
pub enum ViewError {
    #[error("dataset {0:?} not found")]
    DatasetNotFound(String),
    #[error("no {requested} task file; available task types: [{}]", available.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(", "))]
    TaskNotFound {
        requested: TaskType,
        available: Vec<TaskType>,
    },
    #[error("attribute {0} does not exist in the graph")]
    MissingAttribute(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl ViewError {
    pub fn code(&self) -> &'static str {
        match self {
            ViewError::DatasetNotFound(_) => "DatasetNotFound",
            ViewError::TaskNotFound { .. } => "TaskNotFound",
            ViewError::MissingAttribute(_) => "MissingAttribute",
            ViewError::Graph(e) => e.code(),
            ViewError::Task(TaskError::MissingAttribute(_)) => "MissingAttribute",
            ViewError::Task(e) => e.code(),
            ViewError::Io(_) => "IoError",
        }
    }
}

/// A read-only projection of a graph for one task. The graph is shared, not
/// copied, so several views over one graph cost a single load.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetView {
    graph: Arc<GraphStorage>,
    task: TaskConfig,
    masks: SplitMasks,
}

/// One batch of training examples, flattened to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub ids: Vec<usize>,
    /// One row per id: the concatenated feature values.
    pub features: Vec<Vec<f64>>,
    pub target: Vec<f64>,
}

impl DatasetView {
    pub fn graph(&self) -> &GraphStorage {
        &self.graph
    }

    pub fn shared_graph(&self) -> &Arc<GraphStorage> {
        &self.graph
    }

    pub fn task(&self) -> &TaskConfig {
        &self.task
    }

    pub fn masks(&self) -> &SplitMasks {
        &self.masks
    }

    pub fn entity_kind(&self) -> EntityKind {
        self.task.task_type.entity_kind()
    }

    pub fn num_entities(&self) -> usize {
        self.masks.len()
    }

    pub fn features(&self) -> Vec<(&AttrPath, &Tensor)> {
        self.task
            .feature
            .iter()
            .map(|p| (p, &self.graph.attribute(p).expect("checked at construction").0.tensor))
            .collect()
    }

    pub fn target(&self) -> Option<&Tensor> {
        self.task
            .target
            .as_ref()
            .map(|p| &self.graph.attribute(p).expect("checked at construction").0.tensor)
    }

    /// All edges of the graph as global `(src, dst)` pairs.
    pub fn edge_index(&self) -> Vec<(usize, usize)> {
        self.graph.homogeneous_edges()
    }

    /// Extracts up to `size` training examples: features at the task's level
    /// (node features are gathered through both endpoints for edge tasks)
    /// and the target value of each example.
    pub fn first_batch(&self, size: usize) -> Batch {
        let ids: Vec<usize> = self
            .masks
            .train
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
            .take(size)
            .collect();
        let kind = self.entity_kind();
        let edges = if kind == EntityKind::Edge {
            self.graph.homogeneous_edges()
        } else {
            Vec::new()
        };
        let mut rows = vec![Vec::new(); ids.len()];
        for (path, tensor) in self.features() {
            for (row, &id) in rows.iter_mut().zip(&ids) {
                match (kind, path.level) {
                    (EntityKind::Node, Level::Node) | (EntityKind::Graph, Level::Graph) | (EntityKind::Edge, Level::Edge) => {
                        row.extend(row_values(tensor, id))
                    }
                    (EntityKind::Edge, Level::Node) => {
                        let offset = self.node_offset(path);
                        if let Some(&(s, d)) = edges.get(id) {
                            for node in [s, d] {
                                if let Some(local) = node.checked_sub(offset) {
                                    row.extend(row_values(tensor, local));
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        let target = match self.target() {
            Some(t) => ids.iter().map(|&i| row_values(t, i).first().copied().unwrap_or(f64::NAN)).collect(),
            None => Vec::new(),
        };
        Batch {
            ids,
            features: rows,
            target,
        }
    }

    fn node_offset(&self, path: &AttrPath) -> usize {
        match &path.group {
            Some(g) => self.graph.node_group(g).map_or(0, |g| g.offset),
            None => 0,
        }
    }
}

/// Values of row `i` of a tensor, flattened.
pub fn row_values(t: &Tensor, i: usize) -> Vec<f64> {
    match t {
        Tensor::Dense(a) => {
            if a.ndim() == 0 || i >= a.first_dim() {
                return Vec::new();
            }
            let w = a.row_width();
            (i * w..(i + 1) * w).map(|k| a.get_f64(k)).collect()
        }
        Tensor::Sparse(m) => {
            let mut row = vec![0.0; m.cols()];
            for (r, c, k) in m.entries() {
                if r == i {
                    row[c] += m.values().get_f64(k);
                }
            }
            row
        }
    }
}

/// Combines a loaded graph with a parsed task whose split data is attached.
pub fn combine_graph_and_task(graph: Arc<GraphStorage>, task: TaskConfig) -> Result<DatasetView, ViewError> {
    for path in task.feature.iter().chain(&task.target) {
        if graph.attribute(path).is_none() {
            return Err(ViewError::MissingAttribute(path.to_string()));
        }
    }
    let masks = resolve_splits(&task, &graph)?;
    Ok(DatasetView { graph, task, masks })
}

/// Task files of a dataset directory (`task*.json`), sorted by file name.
pub fn task_files(dir: &Path) -> std::io::Result<Vec<String>> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.starts_with("task") && n.ends_with(".json"))
        .collect();
    names.sort();
    Ok(names)
}

/// Task types declared by the parseable task files of a dataset, with the
/// file defining each, in file-name order.
pub fn available_tasks(dir: &Path) -> std::io::Result<Vec<(String, TaskType)>> {
    let mut out = Vec::new();
    for name in task_files(dir)? {
        if let Ok(text) = fs::read_to_string(dir.join(&name)) {
            if let Ok(task) = parse_task(&text) {
                out.push((name, task.task_type));
            }
        }
    }
    Ok(out)
}

fn select_task(dir: &Path, task_type: TaskType) -> Result<String, ViewError> {
    let tasks = available_tasks(dir)?;
    match tasks.iter().find(|(_, t)| *t == task_type) {
        Some((name, _)) => Ok(name.clone()),
        None => {
            let mut available: Vec<TaskType> = tasks.into_iter().map(|(_, t)| t).collect();
            available.sort();
            available.dedup();
            Err(ViewError::TaskNotFound {
                requested: task_type,
                available,
            })
        }
    }
}

fn dataset_dir(root: &Path, name: &str) -> Result<PathBuf, ViewError> {
    let dir = root.join(name);
    let plain = !name.is_empty() && !name.contains(['/', '\\']) && name != "." && name != "..";
    if plain && dir.join("metadata.json").is_file() {
        Ok(dir)
    } else {
        Err(ViewError::DatasetNotFound(name.to_string()))
    }
}

/// Loads dataset `name` under `root` for `task_type`. When several task files
/// declare the type, the first by file name is used.
pub fn get_dataset(root: impl AsRef<Path>, name: &str, task_type: TaskType) -> Result<DatasetView, ViewError> {
    let dir = dataset_dir(root.as_ref(), name)?;
    let file = select_task(&dir, task_type)?;
    let graph = Arc::new(load_graph(&dir)?);
    combine_graph_and_task(graph, load_task(&dir, &file)?)
}

/// A corpus root with a graph cache, so views of different tasks on one
/// dataset share a single loaded graph.
#[derive(Debug)]
pub struct Corpus {
    root: PathBuf,
    graphs: HashMap<String, Arc<GraphStorage>>,
    graph_loads: usize,
}

impl Corpus {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Corpus {
            root: root.into(),
            graphs: HashMap::new(),
            graph_loads: 0,
        }
    }

    /// Number of times a graph was read from disk.
    pub fn graph_loads(&self) -> usize {
        self.graph_loads
    }

    pub fn graph(&mut self, name: &str) -> Result<Arc<GraphStorage>, ViewError> {
        if let Some(g) = self.graphs.get(name) {
            return Ok(Arc::clone(g));
        }
        let dir = dataset_dir(&self.root, name)?;
        let g = Arc::new(load_graph(dir)?);
        self.graph_loads += 1;
        self.graphs.insert(name.to_string(), Arc::clone(&g));
        Ok(g)
    }

    pub fn get_dataset(&mut self, name: &str, task_type: TaskType) -> Result<DatasetView, ViewError> {
        let dir = dataset_dir(&self.root, name)?;
        let file = select_task(&dir, task_type)?;
        let graph = self.graph(name)?;
        combine_graph_and_task(graph, load_task(&dir, &file)?)
    }
}
