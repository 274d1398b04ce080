use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use super::schema::{
    AttributeSpec, EdgeGroupSpec, GraphLevelSpec, NodeGroupSpec, StructureRef, EDGE_KEY, EDGE_LIST_KEY,
    NODE_LIST_KEY,
};
use super::{
    parse_metadata, Attribute, Attributes, EdgeGroup, GraphError, GraphSchema, GraphSet, GraphStorage,
    Membership, NodeGroup, TensorFormat,
};
use crate::tensor::{DataRef, DenseArray, NpzReader, NpzWriter, Tensor};

/// Name of the single data container written by [`write_graph`].
pub const GRAPH_DATA_FILE: &str = "graph.npz";

/// Resolves data references against a dataset directory, keeping each
/// `.npz` container open so several keys of one file are read from a single
/// handle.
pub struct DataLoader {
    root: PathBuf,
    containers: HashMap<String, NpzReader>,
    reads: usize,
}

impl DataLoader {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataLoader {
            root: root.into(),
            containers: HashMap::new(),
            reads: 0,
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Number of tensors decoded so far.
    pub fn reads(&self) -> usize {
        self.reads
    }

    pub fn load(&mut self, data: &DataRef, format: TensorFormat, pointer: &str) -> Result<Tensor, GraphError> {
        let path = self.root.join(&data.file);
        if !path.is_file() {
            return Err(GraphError::MissingDataFile {
                pointer: pointer.to_string(),
                file: data.file.clone(),
            });
        }
        let wrap = |source| GraphError::Tensor {
            pointer: pointer.to_string(),
            data: data.clone(),
            source,
        };
        self.reads += 1;
        let Some(key) = &data.key else {
            return match format {
                TensorFormat::Dense => crate::tensor::read_array(&path, None).map(Tensor::Dense).map_err(wrap),
                TensorFormat::Sparse => Err(GraphError::Malformed {
                    pointer: pointer.to_string(),
                    message: "sparse tensors must name a key prefix inside an .npz container".into(),
                }),
            };
        };
        if !self.containers.contains_key(&data.file) {
            let reader = NpzReader::open(&path).map_err(wrap)?;
            self.containers.insert(data.file.clone(), reader);
        }
        let reader = self.containers.get_mut(&data.file).expect("inserted above");
        match format {
            TensorFormat::Dense => reader.read(key).map(Tensor::Dense),
            TensorFormat::Sparse => reader.read_sparse(key).map(Tensor::Sparse),
        }
        .map_err(wrap)
    }

    pub fn load_dense(&mut self, data: &DataRef, pointer: &str) -> Result<DenseArray, GraphError> {
        match self.load(data, TensorFormat::Dense, pointer)? {
            Tensor::Dense(a) => Ok(a),
            Tensor::Sparse(_) => unreachable!("dense format requested"),
        }
    }
}

/// Outcome of materializing a schema. `storage` is present only when the
/// graph structure (node ranges, edge lists, memberships) is sound;
/// attributes that failed to load are left out and their pointers listed in
/// `failed_attributes`.
#[derive(Debug)]
pub struct Assembly {
    pub storage: Option<GraphStorage>,
    pub errors: Vec<GraphError>,
    pub failed_attributes: BTreeSet<String>,
}

struct Collector {
    errors: Vec<GraphError>,
    failed: BTreeSet<String>,
}

impl Collector {
    fn attributes(
        &mut self,
        loader: &mut DataLoader,
        specs: &[AttributeSpec],
        expected: Option<usize>,
    ) -> Attributes {
        let mut out = Attributes::new();
        for spec in specs {
            match load_attribute(loader, spec, expected) {
                Ok(a) => {
                    out.insert(spec.name.clone(), a);
                }
                Err(e) => {
                    self.failed.insert(spec.pointer.clone());
                    self.errors.push(e);
                }
            }
        }
        out
    }
}

fn load_attribute(loader: &mut DataLoader, spec: &AttributeSpec, expected: Option<usize>) -> Result<Attribute, GraphError> {
    let tensor = loader.load(&spec.data, spec.format, &spec.pointer)?;
    if let Some(declared) = spec.declared() {
        if !declared.accepts(tensor.dtype()) {
            return Err(GraphError::DtypeMismatch {
                pointer: spec.pointer.clone(),
                declared: spec.declared_type.clone().unwrap_or_default(),
                actual: tensor.dtype(),
            });
        }
    }
    if let Some(expected) = expected {
        let shape = tensor.shape();
        if shape.is_empty() || shape[0] != expected {
            return Err(GraphError::ShapeMismatch {
                pointer: spec.pointer.clone(),
                expected,
                actual: shape.first().copied().unwrap_or(0),
            });
        }
    }
    Ok(Attribute {
        description: spec.description.clone(),
        declared_type: spec.declared_type.clone(),
        tensor,
    })
}

fn malformed(pointer: &str, message: impl Into<String>) -> GraphError {
    GraphError::Malformed {
        pointer: pointer.to_string(),
        message: message.into(),
    }
}

/// Loads a group's `_NodeList` and returns its `(offset, count)` id range.
fn node_range(loader: &mut DataLoader, s: &StructureRef) -> Result<(usize, usize), GraphError> {
    if s.format != TensorFormat::Dense {
        return Err(malformed(&s.pointer, "a node id list must be a dense tensor"));
    }
    let ids = loader.load_dense(&s.data, &s.pointer)?;
    let values = match (ids.ndim(), ids.to_i64_vec()) {
        (1, Some(v)) => v,
        _ => return Err(malformed(&s.pointer, "a node id list must be a 1-D integer array")),
    };
    let Some(&first) = values.first() else {
        return Ok((0, 0));
    };
    if first < 0 || values.iter().enumerate().any(|(i, &v)| v != first + i as i64) {
        return Err(malformed(&s.pointer, "node ids must form a contiguous ascending range"));
    }
    Ok((first as usize, values.len()))
}

/// Structural check of an `M x 2` edge array against the node total.
pub(super) fn check_edges(group: &str, edges: &DenseArray, n: usize, pointer: &str) -> Result<(), GraphError> {
    let ids = match (edges.shape(), edges.to_i64_vec()) {
        ([_, 2], Some(ids)) => ids,
        _ => {
            return Err(malformed(
                pointer,
                format!("edge list must be an M x 2 integer array, found {} {:?}", edges.dtype(), edges.shape()),
            ))
        }
    };
    match ids.into_iter().find(|&id| id < 0 || id as u64 >= n as u64) {
        Some(id) => Err(GraphError::DanglingEdge {
            group: group.to_string(),
            id,
            bound: n,
        }),
        None => Ok(()),
    }
}

pub(super) fn check_membership(m: &Membership, n: usize, pointer: &str) -> Result<(), GraphError> {
    match &m.0 {
        Tensor::Dense(a) if a.ndim() == 1 => {
            let Some(v) = a.to_i64_vec() else {
                return Err(malformed(pointer, "graph assignment must hold integer graph ids"));
            };
            if v.iter().any(|&g| g < 0) {
                return Err(malformed(pointer, "graph ids must be non-negative"));
            }
        }
        Tensor::Dense(a) if a.ndim() == 2 => {
            if (0..a.len()).any(|i| !matches!(a.get_f64(i), x if x == 0.0 || x == 1.0)) {
                return Err(malformed(pointer, "indicator matrices hold only 0/1 entries"));
            }
        }
        Tensor::Dense(_) => return Err(malformed(pointer, "membership must be 1-D or 2-D")),
        Tensor::Sparse(_) => {}
    }
    if m.element_count() != n {
        return Err(GraphError::ShapeMismatch {
            pointer: pointer.to_string(),
            expected: n,
            actual: m.element_count(),
        });
    }
    Ok(())
}

fn containing_group(groups: &[NodeGroup], ids: impl Iterator<Item = usize>) -> Option<String> {
    let mut found: Option<&NodeGroup> = None;
    for id in ids {
        match found {
            Some(g) if (g.offset..g.offset + g.count).contains(&id) => {}
            Some(_) => return None,
            None => found = Some(groups.iter().find(|g| (g.offset..g.offset + g.count).contains(&id))?),
        }
    }
    found.map(|g| g.name.clone())
}

/// Materializes every tensor of `schema`, collecting all defects instead of
/// stopping at the first one.
pub fn assemble(schema: &GraphSchema, loader: &mut DataLoader) -> Assembly {
    let mut c = Collector {
        errors: Vec::new(),
        failed: BTreeSet::new(),
    };
    let mut structure_ok = true;

    // node id ranges
    let mut ranges: Vec<Option<(usize, usize)>> = Vec::new();
    for g in &schema.node_groups {
        let range = match &g.node_list {
            Some(s) => match node_range(loader, s) {
                Ok(r) => Some(r),
                Err(e) => {
                    structure_ok = false;
                    c.errors.push(e);
                    None
                }
            },
            None => None,
        };
        ranges.push(range);
    }
    if schema.is_heterogeneous && structure_ok {
        let mut order: Vec<usize> = (0..ranges.len()).collect();
        order.sort_by_key(|&i| ranges[i].map(|r| r.0));
        let mut next = 0;
        // empty groups own no ids and are pinned to offset 0
        for i in order {
            let (offset, count) = ranges[i].expect("heterogeneous groups declare ranges");
            if count == 0 {
                continue;
            }
            if offset != next {
                let s = schema.node_groups[i].node_list.as_ref().expect("checked by parser");
                c.errors.push(malformed(
                    &s.pointer,
                    format!("node id ranges must tile 0..N without gaps; expected start {next}, found {offset}"),
                ));
                structure_ok = false;
                break;
            }
            next += count;
        }
    }

    // edge lists
    let mut edge_arrays: Vec<Option<DenseArray>> = Vec::new();
    for g in &schema.edge_groups {
        let s = &g.edge_list;
        let loaded = if s.format != TensorFormat::Dense {
            Err(malformed(&s.pointer, "an edge list must be a dense tensor"))
        } else {
            loader.load_dense(&s.data, &s.pointer).and_then(|a| {
                match (a.shape(), a.dtype().is_integer()) {
                    ([_, 2], true) => Ok(a),
                    _ => Err(malformed(
                        &s.pointer,
                        format!("edge list must be an M x 2 integer array, found {} {:?}", a.dtype(), a.shape()),
                    )),
                }
            })
        };
        match loaded {
            Ok(a) => edge_arrays.push(Some(a)),
            Err(e) => {
                structure_ok = false;
                c.errors.push(e);
                edge_arrays.push(None);
            }
        }
    }

    // node attributes; a homogeneous graph without an id list takes its node
    // count from the first loadable attribute, then from the edge list
    let mut node_groups = Vec::new();
    for (g, range) in schema.node_groups.iter().zip(&ranges) {
        let range = match range {
            Some(r) => Some(*r),
            None if !schema.is_heterogeneous && g.node_list.is_none() => infer_count(loader, g, &edge_arrays).map(|n| (0, n)),
            None => None,
        };
        let attributes = c.attributes(loader, &g.attributes, range.map(|r| r.1));
        if let Some((offset, count)) = range {
            node_groups.push(NodeGroup {
                name: g.name.clone(),
                offset,
                count,
                attributes,
            });
        }
    }
    let n: usize = node_groups.iter().map(|g| g.count).sum();

    let mut edge_groups = Vec::new();
    for (g, edges) in schema.edge_groups.iter().zip(edge_arrays) {
        let Some(edges) = edges else {
            c.attributes(loader, &g.attributes, None);
            continue;
        };
        if structure_ok {
            if let Err(e) = check_edges(&g.name, &edges, n, &g.edge_list.pointer) {
                structure_ok = false;
                c.errors.push(e);
            }
        }
        let m = edges.first_dim();
        let attributes = c.attributes(loader, &g.attributes, Some(m));
        let pairs: Vec<i64> = edges.to_i64_vec().unwrap_or_default();
        let (src_group, dst_group) = if structure_ok {
            (
                containing_group(&node_groups, pairs.iter().step_by(2).map(|&v| v as usize)),
                containing_group(&node_groups, pairs.iter().skip(1).step_by(2).map(|&v| v as usize)),
            )
        } else {
            (None, None)
        };
        edge_groups.push(EdgeGroup {
            name: g.name.clone(),
            src_group,
            dst_group,
            edges,
            attributes,
        });
    }
    let m_total: usize = edge_groups.iter().map(|g| g.len()).sum();

    let graphs = schema.graph.as_ref().and_then(|spec| {
        let nodes = match &spec.node_list {
            Some(s) => load_membership(loader, s, n, structure_ok),
            None => Ok(Membership(Tensor::Dense(DenseArray::vector(vec![0i64; n])))),
        };
        let edges = spec
            .edge_list
            .as_ref()
            .map(|s| load_membership(loader, s, m_total, structure_ok))
            .transpose();
        match (nodes, edges) {
            (Ok(nodes), Ok(edges)) => {
                let count = nodes.graph_count();
                let attributes = c.attributes(loader, &spec.attributes, Some(count));
                Some(GraphSet { nodes, edges, attributes })
            }
            (nodes, edges) => {
                c.errors.extend(nodes.err());
                c.errors.extend(edges.err());
                structure_ok = false;
                c.attributes(loader, &spec.attributes, None);
                None
            }
        }
    });

    let complete = node_groups.len() == schema.node_groups.len();
    let storage = (structure_ok && complete).then(|| GraphStorage {
        description: schema.description.clone(),
        citation: schema.citation.clone(),
        directed: schema.is_directed,
        heterogeneous: schema.is_heterogeneous,
        node_groups,
        edge_groups,
        graphs,
    });
    Assembly {
        storage,
        errors: c.errors,
        failed_attributes: c.failed,
    }
}

/// Node count of a homogeneous graph without an id list: the most common
/// leading dimension among its node attributes (larger wins a tie), so one
/// malformed attribute is reported on its own; without attributes, one more
/// than the largest edge endpoint.
fn infer_count(loader: &mut DataLoader, g: &NodeGroupSpec, edges: &[Option<DenseArray>]) -> Option<usize> {
    let mut votes: BTreeMap<usize, usize> = BTreeMap::new();
    for a in &g.attributes {
        if let Ok(t) = loader.load(&a.data, a.format, &a.pointer) {
            if !t.shape().is_empty() {
                *votes.entry(t.first_dim()).or_default() += 1;
            }
        }
    }
    if let Some((&count, _)) = votes.iter().max_by_key(|(&dim, &n)| (n, dim)) {
        return Some(count);
    }
    if edges.iter().any(Option::is_none) {
        return None;
    }
    let max = edges
        .iter()
        .flatten()
        .filter_map(|e| e.to_i64_vec())
        .flat_map(|v| v.into_iter().max())
        .max();
    Some(max.map_or(0, |m| if m >= 0 { m as usize + 1 } else { 0 }))
}

fn load_membership(loader: &mut DataLoader, s: &StructureRef, n: usize, check: bool) -> Result<Membership, GraphError> {
    let m = Membership(loader.load(&s.data, s.format, &s.pointer)?);
    if check {
        check_membership(&m, n, &s.pointer)?;
    }
    Ok(m)
}

/// Reads `dir/metadata.json` and every tensor it references.
pub fn load_graph(dir: impl AsRef<Path>) -> Result<GraphStorage, GraphError> {
    let dir = dir.as_ref();
    let meta = dir.join("metadata.json");
    if !meta.is_file() {
        return Err(GraphError::MissingMetadata(dir.to_path_buf()));
    }
    let schema = parse_metadata(&fs::read_to_string(meta)?)?;
    let mut loader = DataLoader::new(dir);
    let Assembly { storage, mut errors, .. } = assemble(&schema, &mut loader);
    if !errors.is_empty() {
        return Err(errors.swap_remove(0));
    }
    Ok(storage.expect("no errors implies a complete graph"))
}

/// Writes `metadata.json` and a single `graph.npz` holding every tensor.
/// The graph is checked first, so an invalid graph leaves `dir` untouched.
pub fn write_graph(graph: &GraphStorage, dir: impl AsRef<Path>) -> Result<(), GraphError> {
    graph.check()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let tensor_err = |key: &str, source| GraphError::Tensor {
        pointer: String::new(),
        data: DataRef {
            file: GRAPH_DATA_FILE.into(),
            key: Some(key.to_string()),
        },
        source,
    };
    let mut writer = NpzWriter::create(&dir.join(GRAPH_DATA_FILE)).map_err(|e| tensor_err("", e))?;
    let mut put = |key: String, tensor: &Tensor| -> Result<StructureRef, GraphError> {
        match tensor {
            Tensor::Dense(a) => writer.add(&key, a),
            Tensor::Sparse(m) => writer.add_sparse(&key, m),
        }
        .map_err(|e| tensor_err(&key, e))?;
        Ok(StructureRef {
            format: if tensor.is_sparse() { TensorFormat::Sparse } else { TensorFormat::Dense },
            data: DataRef {
                file: GRAPH_DATA_FILE.into(),
                key: Some(key),
            },
            pointer: String::new(),
        })
    };
    let put_attrs = |prefix: &str, attrs: &Attributes, put: &mut dyn FnMut(String, &Tensor) -> Result<StructureRef, GraphError>| {
        attrs
            .iter()
            .map(|(name, a)| {
                let s = put(format!("{prefix}{name}"), &a.tensor)?;
                Ok(AttributeSpec {
                    name: name.clone(),
                    description: a.description.clone(),
                    declared_type: a.declared_type.clone(),
                    format: s.format,
                    data: s.data,
                    pointer: String::new(),
                })
            })
            .collect::<Result<Vec<_>, GraphError>>()
    };
    let prefix = |level: &str, group: &str| {
        if graph.heterogeneous {
            format!("{level}/{group}/")
        } else {
            format!("{level}/")
        }
    };

    let mut node_groups = Vec::new();
    for g in &graph.node_groups {
        let p = prefix("Node", &g.name);
        let ids: Vec<i64> = (g.offset..g.offset + g.count).map(|i| i as i64).collect();
        let node_list = put(format!("{p}{NODE_LIST_KEY}"), &Tensor::Dense(DenseArray::vector(ids)))?;
        node_groups.push(NodeGroupSpec {
            name: g.name.clone(),
            node_list: Some(node_list),
            attributes: put_attrs(&p, &g.attributes, &mut put)?,
        });
    }
    let mut edge_groups = Vec::new();
    for g in &graph.edge_groups {
        let p = prefix("Edge", &g.name);
        let edge_list = put(format!("{p}{EDGE_KEY}"), &Tensor::Dense(g.edges.clone()))?;
        edge_groups.push(EdgeGroupSpec {
            name: g.name.clone(),
            edge_list,
            attributes: put_attrs(&p, &g.attributes, &mut put)?,
        });
    }
    let graph_spec = match &graph.graphs {
        None => None,
        Some(set) => Some(GraphLevelSpec {
            node_list: Some(put(format!("Graph/{NODE_LIST_KEY}"), &set.nodes.0)?),
            edge_list: match &set.edges {
                Some(e) => Some(put(format!("Graph/{EDGE_LIST_KEY}"), &e.0)?),
                None => None,
            },
            attributes: put_attrs("Graph/", &set.attributes, &mut put)?,
        }),
    };
    writer.finish().map_err(|e| tensor_err("", e))?;

    let schema = GraphSchema {
        description: graph.description.clone(),
        citation: graph.citation.clone(),
        is_heterogeneous: graph.heterogeneous,
        is_directed: graph.directed,
        node_groups,
        edge_groups,
        graph: graph_spec,
    };
    let text = serde_json::to_string_pretty(&schema.to_json()).expect("JSON values always serialize");
    fs::write(dir.join("metadata.json"), text + "\n")?;
    Ok(())
}
