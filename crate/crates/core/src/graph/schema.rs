//! The `metadata.json` document describing a dataset's graph.
//!
//! ```json
//! {
//!   "description": "...",
//!   "is_heterogeneous": false,
//!   "is_directed": false,
//!   "citation": "@article{...}",
//!   "data": {
//!     "Node": { "NodeLabel": {"description": "...", "type": "int64",
//!                             "format": "Tensor", "file": "g.npz", "key": "y"} },
//!     "Edge": { "_Edge": {"file": "g.npz", "key": "edge"} },
//!     "Graph": { "_NodeList": {...}, "_EdgeList": {...} }
//!   }
//! }
//! ```
//!
//! Heterogeneous datasets nest one object per group under `Node`/`Edge`;
//! each node group then declares its global id range through `_NodeList`.

use serde_json::{json, Map, Value};

use super::GraphError;
use crate::json::{parse_strict, pointer_join, StrictJsonError};
use crate::tensor::{DType, DataRef};

pub const EDGE_KEY: &str = "_Edge";
pub const NODE_LIST_KEY: &str = "_NodeList";
pub const EDGE_LIST_KEY: &str = "_EdgeList";

/// The three storage levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Node,
    Edge,
    Graph,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Node => "Node",
            Level::Edge => "Edge",
            Level::Graph => "Graph",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "Node" => Some(Level::Node),
            "Edge" => Some(Level::Edge),
            "Graph" => Some(Level::Graph),
            _ => None,
        }
    }
}

/// Dense or sparse on-disk layout of a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorFormat {
    Dense,
    Sparse,
}

impl TensorFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            TensorFormat::Dense => "Tensor",
            TensorFormat::Sparse => "SparseTensor",
        }
    }
}

/// Declared element type of an attribute: either an exact dtype or a kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclaredType {
    Exact(DType),
    Int,
    Float,
    Bool,
}

impl DeclaredType {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "int" => Some(DeclaredType::Int),
            "float" => Some(DeclaredType::Float),
            "bool" => Some(DeclaredType::Bool),
            other => DType::from_name(other).map(DeclaredType::Exact),
        }
    }

    pub fn accepts(self, dtype: DType) -> bool {
        match self {
            DeclaredType::Exact(d) => d == dtype,
            DeclaredType::Int => dtype.is_integer(),
            DeclaredType::Float => dtype.is_float(),
            DeclaredType::Bool => dtype == DType::Bool,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSpec {
    pub name: String,
    pub description: String,
    /// Raw `type` string as written in the metadata.
    pub declared_type: Option<String>,
    pub format: TensorFormat,
    pub data: DataRef,
    /// JSON pointer of the attribute entry.
    pub pointer: String,
}

impl AttributeSpec {
    pub fn declared(&self) -> Option<DeclaredType> {
        self.declared_type.as_deref().and_then(DeclaredType::parse)
    }
}

/// A reserved structural reference (`_Edge`, `_NodeList`, `_EdgeList`).
#[derive(Debug, Clone, PartialEq)]
pub struct StructureRef {
    pub format: TensorFormat,
    pub data: DataRef,
    pub pointer: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeGroupSpec {
    pub name: String,
    pub node_list: Option<StructureRef>,
    pub attributes: Vec<AttributeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeGroupSpec {
    pub name: String,
    pub edge_list: StructureRef,
    pub attributes: Vec<AttributeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphLevelSpec {
    pub node_list: Option<StructureRef>,
    pub edge_list: Option<StructureRef>,
    pub attributes: Vec<AttributeSpec>,
}

/// Parsed `metadata.json`. Data references are checked for path safety but
/// not yet resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSchema {
    pub description: String,
    pub citation: Option<String>,
    pub is_heterogeneous: bool,
    pub is_directed: bool,
    pub node_groups: Vec<NodeGroupSpec>,
    pub edge_groups: Vec<EdgeGroupSpec>,
    pub graph: Option<GraphLevelSpec>,
}

impl GraphSchema {
    /// Every data reference in the schema with its JSON pointer.
    pub fn data_refs(&self) -> Vec<(&DataRef, &str)> {
        let mut out = Vec::new();
        for g in &self.node_groups {
            if let Some(s) = &g.node_list {
                out.push((&s.data, s.pointer.as_str()));
            }
            out.extend(g.attributes.iter().map(|a| (&a.data, a.pointer.as_str())));
        }
        for g in &self.edge_groups {
            out.push((&g.edge_list.data, g.edge_list.pointer.as_str()));
            out.extend(g.attributes.iter().map(|a| (&a.data, a.pointer.as_str())));
        }
        if let Some(g) = &self.graph {
            for s in [&g.node_list, &g.edge_list].into_iter().flatten() {
                out.push((&s.data, s.pointer.as_str()));
            }
            out.extend(g.attributes.iter().map(|a| (&a.data, a.pointer.as_str())));
        }
        out
    }

    /// Renders the schema back into its JSON document form.
    pub fn to_json(&self) -> Value {
        let mut data = Map::new();
        let node = if self.is_heterogeneous {
            let mut groups = Map::new();
            for g in &self.node_groups {
                groups.insert(g.name.clone(), Value::Object(group_entries(g.node_list.as_ref(), NODE_LIST_KEY, &g.attributes)));
            }
            groups
        } else {
            self.node_groups
                .first()
                .map(|g| group_entries(g.node_list.as_ref(), NODE_LIST_KEY, &g.attributes))
                .unwrap_or_default()
        };
        data.insert("Node".into(), Value::Object(node));
        let edge = if self.is_heterogeneous {
            let mut groups = Map::new();
            for g in &self.edge_groups {
                groups.insert(g.name.clone(), Value::Object(group_entries(Some(&g.edge_list), EDGE_KEY, &g.attributes)));
            }
            groups
        } else {
            self.edge_groups
                .first()
                .map(|g| group_entries(Some(&g.edge_list), EDGE_KEY, &g.attributes))
                .unwrap_or_default()
        };
        data.insert("Edge".into(), Value::Object(edge));
        if let Some(g) = &self.graph {
            let mut entries = group_entries(g.node_list.as_ref(), NODE_LIST_KEY, &g.attributes);
            if let Some(e) = &g.edge_list {
                entries.insert(EDGE_LIST_KEY.into(), structure_json(e));
            }
            data.insert("Graph".into(), Value::Object(entries));
        }
        let mut doc = Map::new();
        doc.insert("description".into(), json!(self.description));
        doc.insert("data".into(), Value::Object(data));
        if let Some(c) = &self.citation {
            doc.insert("citation".into(), json!(c));
        }
        doc.insert("is_heterogeneous".into(), json!(self.is_heterogeneous));
        doc.insert("is_directed".into(), json!(self.is_directed));
        Value::Object(doc)
    }
}

fn ref_json(data: &DataRef, out: &mut Map<String, Value>) {
    out.insert("file".into(), json!(data.file));
    if let Some(k) = &data.key {
        out.insert("key".into(), json!(k));
    }
}

fn structure_json(s: &StructureRef) -> Value {
    let mut m = Map::new();
    m.insert("format".into(), json!(s.format.as_str()));
    ref_json(&s.data, &mut m);
    Value::Object(m)
}

fn group_entries(structure: Option<&StructureRef>, key: &str, attributes: &[AttributeSpec]) -> Map<String, Value> {
    let mut out = Map::new();
    if let Some(s) = structure {
        out.insert(key.into(), structure_json(s));
    }
    for a in attributes {
        let mut m = Map::new();
        m.insert("description".into(), json!(a.description));
        if let Some(t) = &a.declared_type {
            m.insert("type".into(), json!(t));
        }
        m.insert("format".into(), json!(a.format.as_str()));
        ref_json(&a.data, &mut m);
        out.insert(a.name.clone(), Value::Object(m));
    }
    out
}

fn schema_err(pointer: &str, message: impl Into<String>) -> GraphError {
    GraphError::Schema {
        pointer: pointer.to_string(),
        message: message.into(),
    }
}

fn as_object<'a>(value: &'a Value, pointer: &str) -> Result<&'a Map<String, Value>, GraphError> {
    value
        .as_object()
        .ok_or_else(|| schema_err(pointer, "expected a JSON object"))
}

/// Parses the text of a `metadata.json` document.
pub fn parse_metadata(text: &str) -> Result<GraphSchema, GraphError> {
    let doc = parse_strict(text).map_err(|e| match e {
        StrictJsonError::Syntax(msg) => GraphError::Json(msg),
        StrictJsonError::DuplicateKey { pointer } => duplicate_error(pointer),
    })?;
    let top = as_object(&doc, "")?;

    let description = match top.get("description") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema_err("/description", "expected a string")),
        None => return Err(schema_err("/description", "required field is missing")),
    };
    let citation = match top.get("citation") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(schema_err("/citation", "expected a string")),
    };
    let flag = |key: &str, default: bool| match top.get(key) {
        None => Ok(default),
        Some(Value::Bool(b)) => Ok(*b),
        Some(_) => Err(schema_err(&format!("/{key}"), "expected a boolean")),
    };
    let is_heterogeneous = flag("is_heterogeneous", false)?;
    let is_directed = flag("is_directed", true)?;

    let data = as_object(
        top.get("data")
            .ok_or_else(|| schema_err("/data", "required field is missing"))?,
        "/data",
    )?;
    if let Some(unknown) = data.keys().find(|k| Level::parse(k).is_none()) {
        return Err(schema_err(
            &pointer_join("/data", unknown),
            "unknown level; expected Node, Edge or Graph",
        ));
    }

    let node = as_object(
        data.get("Node")
            .ok_or_else(|| schema_err("/data/Node", "required field is missing"))?,
        "/data/Node",
    )?;
    let edge = as_object(
        data.get("Edge")
            .ok_or_else(|| schema_err("/data/Edge", "required field is missing"))?,
        "/data/Edge",
    )?;

    let mut node_groups = Vec::new();
    let mut edge_groups = Vec::new();
    if is_heterogeneous {
        for (name, group) in node {
            let pointer = pointer_join("/data/Node", name);
            check_group_name(name, &pointer)?;
            let entries = as_object(group, &pointer)?;
            let (node_list, attributes) = parse_entries(entries, &pointer, NODE_LIST_KEY)?;
            if node_list.is_none() {
                return Err(schema_err(
                    &pointer_join(&pointer, NODE_LIST_KEY),
                    "heterogeneous node groups must declare their id range",
                ));
            }
            node_groups.push(NodeGroupSpec {
                name: name.clone(),
                node_list,
                attributes,
            });
        }
        for (name, group) in edge {
            let pointer = pointer_join("/data/Edge", name);
            check_group_name(name, &pointer)?;
            let entries = as_object(group, &pointer)?;
            let (edge_list, attributes) = parse_entries(entries, &pointer, EDGE_KEY)?;
            let edge_list = edge_list.ok_or_else(|| {
                schema_err(&pointer_join(&pointer, EDGE_KEY), "required field is missing")
            })?;
            edge_groups.push(EdgeGroupSpec {
                name: name.clone(),
                edge_list,
                attributes,
            });
        }
    } else {
        let (node_list, attributes) = parse_entries(node, "/data/Node", NODE_LIST_KEY)?;
        node_groups.push(NodeGroupSpec {
            name: "Node".into(),
            node_list,
            attributes,
        });
        let (edge_list, attributes) = parse_entries(edge, "/data/Edge", EDGE_KEY)?;
        let edge_list =
            edge_list.ok_or_else(|| schema_err("/data/Edge/_Edge", "required field is missing"))?;
        edge_groups.push(EdgeGroupSpec {
            name: "Edge".into(),
            edge_list,
            attributes,
        });
    }

    let graph = match data.get("Graph") {
        None => None,
        Some(value) => {
            let entries = as_object(value, "/data/Graph")?;
            let mut node_list = None;
            let mut edge_list = None;
            let mut attributes = Vec::new();
            for (name, entry) in entries {
                let pointer = pointer_join("/data/Graph", name);
                match name.as_str() {
                    NODE_LIST_KEY => node_list = Some(parse_structure(entry, &pointer)?),
                    EDGE_LIST_KEY => edge_list = Some(parse_structure(entry, &pointer)?),
                    _ => attributes.push(parse_attribute(name, entry, &pointer)?),
                }
            }
            Some(GraphLevelSpec {
                node_list,
                edge_list,
                attributes,
            })
        }
    };

    Ok(GraphSchema {
        description,
        citation,
        is_heterogeneous,
        is_directed,
        node_groups,
        edge_groups,
        graph,
    })
}

fn duplicate_error(pointer: String) -> GraphError {
    let tokens: Vec<&str> = pointer.split('/').collect();
    // /data/<Level>/<group> names a group of a heterogeneous level
    if tokens.len() == 4 && tokens[1] == "data" && Level::parse(tokens[2]).is_some() {
        GraphError::DuplicateGroup {
            level: tokens[2].to_string(),
            name: tokens[3].to_string(),
            pointer,
        }
    } else {
        schema_err(&pointer, "duplicate key")
    }
}

fn check_group_name(name: &str, pointer: &str) -> Result<(), GraphError> {
    if name.starts_with('_') || name.is_empty() {
        Err(schema_err(pointer, "group names must be non-empty and must not start with '_'"))
    } else {
        Ok(())
    }
}

type Entries = (Option<StructureRef>, Vec<AttributeSpec>);

fn parse_entries(entries: &Map<String, Value>, pointer: &str, reserved: &str) -> Result<Entries, GraphError> {
    let mut structure = None;
    let mut attributes = Vec::new();
    for (name, entry) in entries {
        let p = pointer_join(pointer, name);
        if name == reserved {
            structure = Some(parse_structure(entry, &p)?);
        } else if name.starts_with('_') {
            return Err(schema_err(&p, format!("unknown reserved key {name:?}")));
        } else {
            attributes.push(parse_attribute(name, entry, &p)?);
        }
    }
    Ok((structure, attributes))
}

fn parse_ref(entry: &Map<String, Value>, pointer: &str) -> Result<DataRef, GraphError> {
    let file = match entry.get("file") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema_err(&format!("{pointer}/file"), "expected a string")),
        None => return Err(schema_err(&format!("{pointer}/file"), "required field is missing")),
    };
    let key = match entry.get("key") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(schema_err(&format!("{pointer}/key"), "expected a string")),
    };
    let data = DataRef { file, key };
    data.check().map_err(|_| GraphError::UnsafePath {
        pointer: format!("{pointer}/file"),
        file: data.file.clone(),
    })?;
    Ok(data)
}

fn parse_format(entry: &Map<String, Value>, pointer: &str) -> Result<TensorFormat, GraphError> {
    match entry.get("format") {
        None => Ok(TensorFormat::Dense),
        Some(Value::String(s)) if s == "Tensor" => Ok(TensorFormat::Dense),
        Some(Value::String(s)) if s == "SparseTensor" => Ok(TensorFormat::Sparse),
        Some(_) => Err(schema_err(
            &format!("{pointer}/format"),
            "expected \"Tensor\" or \"SparseTensor\"",
        )),
    }
}

fn parse_structure(value: &Value, pointer: &str) -> Result<StructureRef, GraphError> {
    let entry = as_object(value, pointer)?;
    Ok(StructureRef {
        format: parse_format(entry, pointer)?,
        data: parse_ref(entry, pointer)?,
        pointer: pointer.to_string(),
    })
}

fn parse_attribute(name: &str, value: &Value, pointer: &str) -> Result<AttributeSpec, GraphError> {
    let entry = as_object(value, pointer)?;
    let description = match entry.get("description") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(schema_err(&format!("{pointer}/description"), "expected a string")),
    };
    let declared_type = match entry.get("type") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if DeclaredType::parse(s).is_some() => Some(s.clone()),
        Some(_) => {
            return Err(schema_err(
                &format!("{pointer}/type"),
                "expected a dtype name (int8..float64, bool) or one of int/float/bool",
            ))
        }
    };
    Ok(AttributeSpec {
        name: name.to_string(),
        description,
        declared_type,
        format: parse_format(entry, pointer)?,
        data: parse_ref(entry, pointer)?,
        pointer: pointer.to_string(),
    })
}
