//! In-memory graphs assembled from a dataset's `metadata.json`.
//!
//! Node ids are global: every node group owns a contiguous id range and edge
//! lists always refer to global ids, so merging groups into one homogeneous
//! graph is just a union of edge lists.

mod io;
pub mod schema;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::tensor::{DType, DataRef, DenseArray, Tensor, TensorError};

pub use io::{assemble, load_graph, write_graph, Assembly, DataLoader, GRAPH_DATA_FILE};
pub use schema::{parse_metadata, GraphSchema, Level, TensorFormat};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("metadata.json not found in {0}")]
    MissingMetadata(PathBuf),
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("duplicate {level} group {name:?} at {pointer}")]
    DuplicateGroup {
        level: String,
        name: String,
        pointer: String,
    },
    #[error("{pointer}: data file {file:?} must be a relative path inside the dataset")]
    UnsafePath { pointer: String, file: String },
    #[error("{pointer}: data file {file:?} does not exist")]
    MissingDataFile { pointer: String, file: String },
    #[error("{pointer}: cannot load {data}: {source}")]
    Tensor {
        pointer: String,
        data: DataRef,
        #[source]
        source: TensorError,
    },
    #[error("{pointer}: {message}")]
    Malformed { pointer: String, message: String },
    #[error("edge group {group:?}: endpoint id {id} is outside the {bound} declared nodes")]
    DanglingEdge { group: String, id: i64, bound: usize },
    #[error("{pointer}: leading dimension is {actual}, expected {expected}")]
    ShapeMismatch {
        pointer: String,
        expected: usize,
        actual: usize,
    },
    #[error("{pointer}: declared type {declared} but data holds {actual}")]
    DtypeMismatch {
        pointer: String,
        declared: String,
        actual: DType,
    },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::MissingMetadata(_) => "MissingMetadata",
            GraphError::Json(_) => "InvalidJson",
            GraphError::Schema { .. } => "SchemaError",
            GraphError::DuplicateGroup { .. } => "DuplicateGroup",
            GraphError::UnsafePath { .. } => "UnsafePath",
            GraphError::MissingDataFile { .. } => "MissingDataFile",
            GraphError::Tensor { source, .. } => source.code(),
            GraphError::Malformed { .. } => "MalformedArray",
            GraphError::DanglingEdge { .. } => "DanglingEdge",
            GraphError::ShapeMismatch { .. } => "ShapeMismatch",
            GraphError::DtypeMismatch { .. } => "DtypeMismatch",
            GraphError::Io(_) => "IoError",
        }
    }

    /// JSON pointer into `metadata.json` locating the defect, when known.
    pub fn pointer(&self) -> Option<&str> {
        match self {
            GraphError::Schema { pointer, .. }
            | GraphError::DuplicateGroup { pointer, .. }
            | GraphError::UnsafePath { pointer, .. }
            | GraphError::MissingDataFile { pointer, .. }
            | GraphError::Tensor { pointer, .. }
            | GraphError::Malformed { pointer, .. }
            | GraphError::ShapeMismatch { pointer, .. }
            | GraphError::DtypeMismatch { pointer, .. } => Some(pointer),
            _ => None,
        }
    }
}

/// A named tensor with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub description: String,
    /// `type` string from the metadata, kept verbatim.
    pub declared_type: Option<String>,
    pub tensor: Tensor,
}

impl Attribute {
    pub fn new(tensor: Tensor) -> Self {
        Attribute {
            description: String::new(),
            declared_type: Some(tensor.dtype().name().to_string()),
            tensor,
        }
    }

    pub fn dense(array: DenseArray) -> Self {
        Attribute::new(Tensor::Dense(array))
    }
}

pub type Attributes = BTreeMap<String, Attribute>;

#[derive(Debug, Clone, PartialEq)]
pub struct NodeGroup {
    pub name: String,
    /// First global id owned by the group; 0 for an empty group.
    pub offset: usize,
    pub count: usize,
    pub attributes: Attributes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGroup {
    pub name: String,
    /// Node group holding every source id, if there is exactly one.
    pub src_group: Option<String>,
    pub dst_group: Option<String>,
    /// `M x 2` integer array of global node ids.
    pub edges: DenseArray,
    pub attributes: Attributes,
}

impl EdgeGroup {
    pub fn len(&self) -> usize {
        self.edges.first_dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Endpoint pairs as `(src, dst)`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let ids = self.edges.to_i64_vec().unwrap_or_default();
        ids.chunks_exact(2).map(|p| (p[0] as usize, p[1] as usize)).collect()
    }
}

/// Membership of nodes (or edges) in the graphs of a multi-graph dataset.
///
/// Accepted encodings: a 1-D assignment vector holding one graph id per
/// element, or a `G x N` indicator matrix (dense or sparse).
#[derive(Debug, Clone, PartialEq)]
pub struct Membership(pub Tensor);

impl Membership {
    /// Number of graphs encoded.
    pub fn graph_count(&self) -> usize {
        match &self.0 {
            Tensor::Dense(a) if a.ndim() == 1 => a
                .to_i64_vec()
                .and_then(|v| v.into_iter().max())
                .map_or(0, |m| if m >= 0 { m as usize + 1 } else { 0 }),
            other => other.first_dim(),
        }
    }

    /// Number of elements (nodes or edges) the membership ranges over.
    pub fn element_count(&self) -> usize {
        match &self.0 {
            Tensor::Dense(a) if a.ndim() == 1 => a.len(),
            Tensor::Dense(a) => a.shape().get(1).copied().unwrap_or(0),
            Tensor::Sparse(m) => m.cols(),
        }
    }

    /// Member ids of every graph.
    pub fn sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.graph_count()];
        match &self.0 {
            Tensor::Dense(a) if a.ndim() == 1 => {
                for (i, g) in a.to_i64_vec().unwrap_or_default().into_iter().enumerate() {
                    if g >= 0 {
                        sets[g as usize].push(i);
                    }
                }
            }
            Tensor::Dense(a) => {
                let width = a.row_width();
                for (k, set) in sets.iter_mut().enumerate() {
                    for i in 0..width {
                        if a.get_f64(k * width + i) != 0.0 {
                            set.push(i);
                        }
                    }
                }
            }
            Tensor::Sparse(m) => {
                for (r, c, k) in m.entries() {
                    if m.values().get_f64(k) != 0.0 {
                        sets[r].push(c);
                    }
                }
                sets.iter_mut().for_each(|s| {
                    s.sort_unstable();
                    s.dedup();
                });
            }
        }
        sets
    }
}

/// Graph-level data of a multi-graph dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSet {
    pub nodes: Membership,
    pub edges: Option<Membership>,
    pub attributes: Attributes,
}

impl GraphSet {
    pub fn count(&self) -> usize {
        self.nodes.graph_count()
    }
}

/// A fully materialized dataset graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStorage {
    pub description: String,
    pub citation: Option<String>,
    pub directed: bool,
    pub heterogeneous: bool,
    pub node_groups: Vec<NodeGroup>,
    pub edge_groups: Vec<EdgeGroup>,
    pub graphs: Option<GraphSet>,
}

/// Address of an attribute: `Node/NodeLabel`, `Edge/EdgeWeight`,
/// `Graph/GraphLabel`, or `Node/<group>/<name>` for heterogeneous graphs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttrPath {
    pub level: Level,
    pub group: Option<String>,
    pub name: String,
}

impl AttrPath {
    pub fn parse(s: &str) -> Option<AttrPath> {
        let parts: Vec<&str> = s.split('/').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return None;
        }
        let level = Level::parse(parts[0])?;
        match parts.len() {
            2 => Some(AttrPath {
                level,
                group: None,
                name: parts[1].to_string(),
            }),
            3 if level != Level::Graph => Some(AttrPath {
                level,
                group: Some(parts[1].to_string()),
                name: parts[2].to_string(),
            }),
            _ => None,
        }
    }
}

impl fmt::Display for AttrPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.group {
            Some(g) => write!(f, "{}/{}/{}", self.level.as_str(), g, self.name),
            None => write!(f, "{}/{}", self.level.as_str(), self.name),
        }
    }
}

impl GraphStorage {
    /// Total node count across groups.
    pub fn num_nodes(&self) -> usize {
        self.node_groups.iter().map(|g| g.count).sum()
    }

    /// Total edge count across groups, counting parallel edges and loops.
    pub fn num_edges(&self) -> usize {
        self.edge_groups.iter().map(|g| g.len()).sum()
    }

    /// Number of graphs; a single-graph dataset counts as one.
    pub fn num_graphs(&self) -> usize {
        self.graphs.as_ref().map_or(1, |g| g.count())
    }

    /// Node ids of every graph. Single-graph datasets yield one set holding
    /// all nodes.
    pub fn graph_node_sets(&self) -> Vec<Vec<usize>> {
        match &self.graphs {
            Some(g) => g.nodes.sets(),
            None => vec![(0..self.num_nodes()).collect()],
        }
    }

    /// All edges of all groups, as global `(src, dst)` pairs.
    pub fn homogeneous_edges(&self) -> Vec<(usize, usize)> {
        self.edge_groups.iter().flat_map(|g| g.pairs()).collect()
    }

    pub fn node_group(&self, name: &str) -> Option<&NodeGroup> {
        self.node_groups.iter().find(|g| g.name == name)
    }

    pub fn edge_group(&self, name: &str) -> Option<&EdgeGroup> {
        self.edge_groups.iter().find(|g| g.name == name)
    }

    /// Looks up an attribute and the element count of its level. Without a
    /// group, a path resolves only when the level has exactly one group.
    pub fn attribute(&self, path: &AttrPath) -> Option<(&Attribute, usize)> {
        fn pick<'a, T>(groups: &'a [T], name: Option<&str>, key: impl Fn(&T) -> &str) -> Option<&'a T> {
            match name {
                Some(n) => groups.iter().find(|g| key(g) == n),
                None if groups.len() == 1 => groups.first(),
                None => None,
            }
        }
        match path.level {
            Level::Node => {
                let g = pick(&self.node_groups, path.group.as_deref(), |g| &g.name)?;
                g.attributes.get(&path.name).map(|a| (a, g.count))
            }
            Level::Edge => {
                let g = pick(&self.edge_groups, path.group.as_deref(), |g| &g.name)?;
                g.attributes.get(&path.name).map(|a| (a, g.len()))
            }
            Level::Graph => {
                let g = self.graphs.as_ref()?;
                g.attributes.get(&path.name).map(|a| (a, g.count()))
            }
        }
    }

    /// Every attribute path present in the graph.
    pub fn attribute_paths(&self) -> Vec<AttrPath> {
        let group = |name: &str| self.heterogeneous.then(|| name.to_string());
        let mut out = Vec::new();
        for g in &self.node_groups {
            out.extend(g.attributes.keys().map(|k| AttrPath {
                level: Level::Node,
                group: group(&g.name),
                name: k.clone(),
            }));
        }
        for g in &self.edge_groups {
            out.extend(g.attributes.keys().map(|k| AttrPath {
                level: Level::Edge,
                group: group(&g.name),
                name: k.clone(),
            }));
        }
        if let Some(g) = &self.graphs {
            out.extend(g.attributes.keys().map(|k| AttrPath {
                level: Level::Graph,
                group: None,
                name: k.clone(),
            }));
        }
        out
    }

    /// Checks every storage invariant: contiguous node id ranges, edge
    /// endpoints in range, attribute lengths matching their level, and
    /// membership widths matching node and edge totals.
    pub fn check(&self) -> Result<(), GraphError> {
        let mut next = 0;
        let mut groups: Vec<&NodeGroup> = self.node_groups.iter().collect();
        groups.sort_by_key(|g| g.offset);
        for g in groups {
            if g.count == 0 && g.offset == 0 {
                continue;
            }
            if g.offset != next {
                return Err(GraphError::Malformed {
                    pointer: format!("/data/Node/{}", g.name),
                    message: format!("node ids must be contiguous; group starts at {} instead of {next}", g.offset),
                });
            }
            next += g.count;
        }
        if !self.heterogeneous && (self.node_groups.len() != 1 || self.edge_groups.len() != 1) {
            return Err(GraphError::Malformed {
                pointer: "/data".into(),
                message: "homogeneous graphs have exactly one node group and one edge group".into(),
            });
        }
        let n = self.num_nodes();
        for g in &self.edge_groups {
            io::check_edges(&g.name, &g.edges, n, &format!("/data/Edge/{}/_Edge", g.name))?;
            check_lengths(&g.attributes, g.len(), &format!("/data/Edge/{}", g.name))?;
        }
        for g in &self.node_groups {
            check_lengths(&g.attributes, g.count, &format!("/data/Node/{}", g.name))?;
        }
        if let Some(set) = &self.graphs {
            io::check_membership(&set.nodes, n, "/data/Graph/_NodeList")?;
            if let Some(e) = &set.edges {
                io::check_membership(e, self.num_edges(), "/data/Graph/_EdgeList")?;
            }
            check_lengths(&set.attributes, set.count(), "/data/Graph")?;
        }
        Ok(())
    }
}

fn check_lengths(attrs: &Attributes, expected: usize, base: &str) -> Result<(), GraphError> {
    for (name, a) in attrs {
        if a.tensor.first_dim() != expected || a.tensor.shape().is_empty() {
            return Err(GraphError::ShapeMismatch {
                pointer: format!("{base}/{name}"),
                expected,
                actual: a.tensor.first_dim(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attr_paths() {
        let p = AttrPath::parse("Node/NodeLabel").unwrap();
        assert_eq!((p.level, p.group, p.name.as_str()), (Level::Node, None, "NodeLabel"));
        let p = AttrPath::parse("Edge/writes/Year").unwrap();
        assert_eq!(p.group.as_deref(), Some("writes"));
        assert_eq!(p.to_string(), "Edge/writes/Year");
        assert!(AttrPath::parse("Graph/a/b").is_none());
        assert!(AttrPath::parse("Nodes/x").is_none());
        assert!(AttrPath::parse("Node/").is_none());
    }

    #[test]
    fn membership_encodings_agree() {
        let assign = Membership(Tensor::Dense(DenseArray::vector(vec![0i64, 0, 1, 1])));
        let indicator = Membership(Tensor::Dense(
            DenseArray::from_vec(vec![2, 4], vec![true, true, false, false, false, false, true, true]).unwrap(),
        ));
        assert_eq!(assign.graph_count(), 2);
        assert_eq!(indicator.graph_count(), 2);
        assert_eq!(assign.sets(), indicator.sets());
        assert_eq!(assign.element_count(), indicator.element_count());
    }
}
