use crate::graph::{AttrPath, GraphStorage, Level};
use crate::task::{TaskConfig, TaskType};
use crate::tensor::Tensor;
use crate::view::row_values;

/// Compressed adjacency: the neighbours of `u` are `targets[offsets[u]..offsets[u + 1]]`,
/// sorted ascending and free of duplicates.
#[derive(Debug, Clone, Default)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    fn build(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Self {
        let mut lists = vec![Vec::new(); n];
        for (u, v) in pairs {
            lists[u].push(v);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut l in lists {
            l.sort_unstable();
            l.dedup();
            targets.extend(l);
            offsets.push(targets.len());
        }
        Adjacency { offsets, targets }
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Number of stored (u, v) entries.
    pub fn arcs(&self) -> usize {
        self.targets.len()
    }

    /// Position of the first neighbour of `u` in the flat target list.
    pub(crate) fn offset(&self, u: usize) -> usize {
        self.offsets[u]
    }
}

/// A homogeneous graph prepared for metric computation, optionally carrying
/// class labels and node feature rows.
///
/// Self-loops and parallel edges are dropped from the adjacency structures
/// but still count towards [`LabeledGraph::num_edges`].
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    directed: bool,
    n: usize,
    m: usize,
    out: Adjacency,
    inn: Adjacency,
    und: Adjacency,
    labels: Option<Vec<Option<i64>>>,
    features: Option<Vec<Vec<f64>>>,
}

impl LabeledGraph {
    /// Panics if an endpoint is not below `n`.
    pub fn new(n: usize, directed: bool, edges: &[(usize, usize)]) -> Self {
        assert!(edges.iter().all(|&(u, v)| u < n && v < n), "edge endpoint out of range");
        let simple = || edges.iter().copied().filter(|(u, v)| u != v);
        let out = Adjacency::build(n, simple());
        let inn = Adjacency::build(n, simple().map(|(u, v)| (v, u)));
        let und = Adjacency::build(n, simple().flat_map(|(u, v)| [(u, v), (v, u)]));
        let (out, inn) = if directed { (out, inn) } else { (und.clone(), und.clone()) };
        LabeledGraph {
            directed,
            n,
            m: edges.len(),
            out,
            inn,
            und,
            labels: None,
            features: None,
        }
    }

    /// Panics if the label vector length differs from the node count.
    pub fn with_labels(mut self, labels: Vec<Option<i64>>) -> Self {
        assert_eq!(labels.len(), self.n, "one label slot per node");
        self.labels = Some(labels);
        self
    }

    /// Rows may be empty for nodes without features. Panics if the row count
    /// differs from the node count.
    pub fn with_features(mut self, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(rows.len(), self.n, "one feature row per node");
        self.features = Some(rows);
        self
    }

    /// The structure of a stored graph with every edge group merged.
    pub fn from_storage(graph: &GraphStorage) -> Self {
        LabeledGraph::new(graph.num_nodes(), graph.directed, &graph.homogeneous_edges())
    }

    /// Like [`LabeledGraph::from_storage`], taking class labels and features
    /// from a node classification task. Other task types contribute nothing.
    pub fn from_task(graph: &GraphStorage, task: &TaskConfig) -> Self {
        let mut out = LabeledGraph::from_storage(graph);
        if task.task_type != TaskType::NodeClassification {
            return out;
        }
        if let Some(labels) = task.target.as_ref().and_then(|t| node_labels(graph, t)) {
            out = out.with_labels(labels);
        }
        let features: Vec<&AttrPath> = task.feature.iter().filter(|p| p.level == Level::Node).collect();
        if !features.is_empty() {
            let mut rows = vec![Vec::new(); out.n];
            for path in features {
                let Some((attr, _)) = graph.attribute(path) else { continue };
                let offset = node_offset(graph, path);
                for i in 0..attr.tensor.shape().first().copied().unwrap_or(0) {
                    if let Some(row) = rows.get_mut(offset + i) {
                        row.extend(row_values(&attr.tensor, i));
                    }
                }
            }
            out = out.with_features(rows);
        }
        out
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    /// Edge count as stored, parallel edges and self-loops included.
    pub fn num_edges(&self) -> usize {
        self.m
    }

    /// Successors; the neighbours when undirected.
    pub fn out_adj(&self) -> &Adjacency {
        &self.out
    }

    /// Predecessors; the neighbours when undirected.
    pub fn in_adj(&self) -> &Adjacency {
        &self.inn
    }

    /// Neighbours with direction ignored.
    pub fn und_adj(&self) -> &Adjacency {
        &self.und
    }

    pub fn labels(&self) -> Option<&[Option<i64>]> {
        self.labels.as_deref()
    }

    pub fn features(&self) -> Option<&[Vec<f64>]> {
        self.features.as_deref()
    }

    /// Distinct simple edges: each undirected edge once as `(u, v)` with
    /// `u < v`, each directed arc once.
    pub fn simple_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.out.arcs());
        for u in 0..self.n {
            for &v in self.out.neighbors(u) {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Degree used by the distribution and assortativity families: the
    /// neighbour count, or in-degree plus out-degree when directed.
    pub fn degree(&self, u: usize) -> usize {
        if self.directed {
            self.out.degree(u) + self.inn.degree(u)
        } else {
            self.und.degree(u)
        }
    }
}

fn node_offset(graph: &GraphStorage, path: &AttrPath) -> usize {
    match &path.group {
        Some(g) => graph.node_group(g).map_or(0, |g| g.offset),
        None => graph.node_groups.iter().find(|g| g.count > 0).map_or(0, |g| g.offset),
    }
}

/// Integral label per node; nodes outside the attribute's group, and
/// non-integral or non-finite values, get `None`.
fn node_labels(graph: &GraphStorage, path: &AttrPath) -> Option<Vec<Option<i64>>> {
    if path.level != Level::Node {
        return None;
    }
    let (attr, _) = graph.attribute(path)?;
    let Tensor::Dense(a) = &attr.tensor else { return None };
    if a.ndim() != 1 {
        return None;
    }
    let offset = node_offset(graph, path);
    let mut labels = vec![None; graph.num_nodes()];
    for (i, v) in a.to_f64_vec().into_iter().enumerate() {
        if v.is_finite() && v.fract() == 0.0 {
            if let Some(slot) = labels.get_mut(offset + i) {
                *slot = Some(v as i64);
            }
        }
    }
    Some(labels)
}
