//! Task configuration files (`task_<name>.json`) and split resolution.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde_json::{Map, Value};

use crate::graph::{AttrPath, DataLoader, GraphError, GraphStorage, Level};
use crate::json::{parse_strict, StrictJsonError};
use crate::tensor::{DataRef, DenseArray, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskType {
    NodeClassification,
    NodeRegression,
    GraphClassification,
    GraphRegression,
    LinkPrediction,
    TimeDependentLinkPrediction,
    KGEntityPrediction,
    KGRelationPrediction,
}

/// Kind of element a task makes predictions for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntityKind {
    Node,
    Edge,
    Graph,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Node => "node",
            EntityKind::Edge => "edge",
            EntityKind::Graph => "graph",
        }
    }
}

impl TaskType {
    pub const ALL: [TaskType; 8] = [
        TaskType::NodeClassification,
        TaskType::NodeRegression,
        TaskType::GraphClassification,
        TaskType::GraphRegression,
        TaskType::LinkPrediction,
        TaskType::TimeDependentLinkPrediction,
        TaskType::KGEntityPrediction,
        TaskType::KGRelationPrediction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskType::NodeClassification => "NodeClassification",
            TaskType::NodeRegression => "NodeRegression",
            TaskType::GraphClassification => "GraphClassification",
            TaskType::GraphRegression => "GraphRegression",
            TaskType::LinkPrediction => "LinkPrediction",
            TaskType::TimeDependentLinkPrediction => "TimeDependentLinkPrediction",
            TaskType::KGEntityPrediction => "KGEntityPrediction",
            TaskType::KGRelationPrediction => "KGRelationPrediction",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TaskType::NodeClassification => {
                "Node classification task: predict categorical node properties based on other nodes and its features in a graph."
            }
            TaskType::NodeRegression => {
                "Node regression task: predict continuous node properties based on other nodes and its features in a graph."
            }
            TaskType::GraphClassification => {
                "Graph classification task: predict categorical graph properties based on known graph's features."
            }
            TaskType::GraphRegression => {
                "Graph regression task: predict continuous graph properties based on known graph's features."
            }
            TaskType::LinkPrediction => {
                "Link prediction task: predict the existence of a link between two nodes in a graph."
            }
            TaskType::TimeDependentLinkPrediction => {
                "Link prediction task, split by time: the train-validation-test split depends on the creation time of links."
            }
            TaskType::KGEntityPrediction => {
                "Knowledge graph entity prediction task: predict the tail or head node for a triplet in the graph."
            }
            TaskType::KGRelationPrediction => {
                "Knowledge graph relation prediction task: predict the relation type for a triplet in the graph."
            }
        }
    }

    pub fn entity_kind(self) -> EntityKind {
        match self {
            TaskType::NodeClassification | TaskType::NodeRegression => EntityKind::Node,
            TaskType::GraphClassification | TaskType::GraphRegression => EntityKind::Graph,
            _ => EntityKind::Edge,
        }
    }

    pub fn is_classification(self) -> bool {
        matches!(self, TaskType::NodeClassification | TaskType::GraphClassification)
    }

    pub fn requires_target(self) -> bool {
        !matches!(self, TaskType::LinkPrediction | TaskType::TimeDependentLinkPrediction)
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskType {
    type Err = TaskError;

    fn from_str(s: &str) -> Result<Self, TaskError> {
        TaskType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| TaskError::UnknownTaskType {
                found: s.to_string(),
                supported: TaskType::ALL.iter().map(|t| t.as_str().to_string()).collect(),
            })
    }
}

/// All supported task types with a one-line description, in canonical order.
pub fn list_task_types() -> Vec<(TaskType, &'static str)> {
    TaskType::ALL.iter().map(|&t| (t, t.description())).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum TaskError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unknown task type {found:?}; supported: {}", supported.join(", "))]
    UnknownTaskType { found: String, supported: Vec<String> },
    #[error("missing field {0:?}")]
    MissingField(String),
    #[error("invalid field {field:?}: {message}")]
    InvalidField { field: String, message: String },
    #[error("split ratios sum to {sum}, which exceeds 1")]
    BadRatio { sum: f64 },
    #[error("{set}: index {index} outside the {bound} {kind}s of the task")]
    IndexOutOfRange {
        set: &'static str,
        index: i64,
        bound: usize,
        kind: &'static str,
    },
    #[error("{first} and {second} share element {index}")]
    OverlappingSplit {
        first: &'static str,
        second: &'static str,
        index: usize,
    },
    #[error("{0} is empty")]
    EmptySplit(&'static str),
    #[error("{set} lists index {index} more than once")]
    DuplicateIndex { set: &'static str, index: i64 },
    #[error("{0} data has not been loaded")]
    SplitNotLoaded(&'static str),
    #[error("attribute {0} does not exist in the graph")]
    MissingAttribute(String),
    #[error("split index {index} requested but the task defines {count} splits")]
    NoSuchSplit { index: usize, count: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl TaskError {
    pub fn code(&self) -> &'static str {
        match self {
            TaskError::Json(_) => "InvalidJson",
            TaskError::UnknownTaskType { .. } => "UnknownTaskType",
            TaskError::MissingField(_) => "MissingField",
            TaskError::InvalidField { .. } => "InvalidField",
            TaskError::BadRatio { .. } => "BadRatio",
            TaskError::IndexOutOfRange { .. } => "IndexOutOfRange",
            TaskError::OverlappingSplit { .. } => "OverlappingSplit",
            TaskError::EmptySplit(_) => "EmptySplit",
            TaskError::DuplicateIndex { .. } => "DuplicateIndex",
            TaskError::SplitNotLoaded(_) => "SplitNotLoaded",
            TaskError::MissingAttribute(_) => "MissingAttribute",
            TaskError::NoSuchSplit { .. } => "NoSuchSplit",
            TaskError::Graph(e) => e.code(),
            TaskError::Io(_) => "IoError",
        }
    }
}

/// One fixed split set: an index array or a boolean mask.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSet {
    pub source: DataRef,
    pub data: Option<DenseArray>,
}

impl SplitSet {
    pub fn from_data(data: DenseArray) -> Self {
        SplitSet {
            source: DataRef {
                file: "<memory>".into(),
                key: None,
            },
            data: Some(data),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitSpec {
    Fixed {
        train: SplitSet,
        val: SplitSet,
        test: SplitSet,
    },
    Random {
        ratios: [f64; 3],
        seed: u64,
        num_splits: usize,
    },
    /// Edges are split by a timestamp attribute: `t < val_time` trains,
    /// `val_time <= t < test_time` validates, the rest tests.
    Temporal {
        time_attribute: AttrPath,
        val_time: f64,
        test_time: f64,
    },
}

/// Element a knowledge-graph task predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionSlot {
    Head,
    Tail,
    Relation,
}

impl PredictionSlot {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictionSlot::Head => "head",
            PredictionSlot::Tail => "tail",
            PredictionSlot::Relation => "relation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskConfig {
    pub task_type: TaskType,
    pub description: String,
    pub feature: Vec<AttrPath>,
    pub target: Option<AttrPath>,
    pub num_classes: Option<usize>,
    pub split: SplitSpec,
    pub val_neg: Option<DataRef>,
    pub test_neg: Option<DataRef>,
    pub prediction_slot: Option<PredictionSlot>,
}

impl TaskConfig {
    pub fn num_splits(&self) -> usize {
        match self.split {
            SplitSpec::Random { num_splits, .. } => num_splits,
            _ => 1,
        }
    }
}

/// Boolean train/validation/test masks over the task's entities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMasks {
    pub train: Vec<bool>,
    pub val: Vec<bool>,
    pub test: Vec<bool>,
}

impl SplitMasks {
    pub fn len(&self) -> usize {
        self.train.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty()
    }

    pub fn sizes(&self) -> [usize; 3] {
        let count = |m: &[bool]| m.iter().filter(|&&b| b).count();
        [count(&self.train), count(&self.val), count(&self.test)]
    }
}

fn invalid(field: &str, message: impl Into<String>) -> TaskError {
    TaskError::InvalidField {
        field: field.to_string(),
        message: message.into(),
    }
}

struct Fields<'a>(&'a Map<String, Value>);

impl Fields<'_> {
    fn string(&self, key: &str) -> Result<Option<String>, TaskError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(invalid(key, "expected a string")),
        }
    }

    fn required_string(&self, key: &str) -> Result<String, TaskError> {
        self.string(key)?.ok_or_else(|| TaskError::MissingField(key.to_string()))
    }

    fn path(&self, key: &str) -> Result<Option<AttrPath>, TaskError> {
        self.string(key)?
            .map(|s| AttrPath::parse(&s).ok_or_else(|| invalid(key, format!("{s:?} is not an attribute path"))))
            .transpose()
    }

    fn number(&self, key: &str) -> Result<Option<f64>, TaskError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Number(n)) => Ok(n.as_f64()),
            Some(_) => Err(invalid(key, "expected a number")),
        }
    }

    fn unsigned(&self, key: &str) -> Result<Option<u64>, TaskError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Number(n)) => n
                .as_u64()
                .map(Some)
                .ok_or_else(|| invalid(key, "expected a non-negative integer")),
            Some(_) => Err(invalid(key, "expected a non-negative integer")),
        }
    }

    fn data_ref(&self, key: &str) -> Result<Option<DataRef>, TaskError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => {
                let r: DataRef = serde_json::from_value(v.clone())
                    .map_err(|_| invalid(key, "expected {\"file\": ..., \"key\": ...}"))?;
                r.check()
                    .map_err(|_| invalid(key, "path must be relative and stay inside the dataset"))?;
                Ok(Some(r))
            }
        }
    }
}

/// Parses the text of a task file.
pub fn parse_task(text: &str) -> Result<TaskConfig, TaskError> {
    let doc = parse_strict(text).map_err(|e| match e {
        StrictJsonError::Syntax(m) => TaskError::Json(m),
        StrictJsonError::DuplicateKey { pointer } => invalid(&pointer, "duplicate key"),
    })?;
    let obj = doc.as_object().ok_or_else(|| invalid("", "expected a JSON object"))?;
    let f = Fields(obj);

    let task_type: TaskType = f.required_string("type")?.parse()?;
    let description = f.string("description")?.unwrap_or_default();

    let feature = match obj.get("feature") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_str()
                    .and_then(AttrPath::parse)
                    .ok_or_else(|| invalid("feature", format!("{v} is not an attribute path")))
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(invalid("feature", "expected a list of attribute paths")),
    };

    let target = f.path("target")?;
    if task_type.requires_target() && target.is_none() {
        return Err(TaskError::MissingField("target".into()));
    }
    if let Some(t) = &target {
        let level = match task_type.entity_kind() {
            EntityKind::Node => Level::Node,
            EntityKind::Edge => Level::Edge,
            EntityKind::Graph => Level::Graph,
        };
        if t.level != level {
            return Err(invalid("target", format!("{task_type} targets live at the {} level", level.as_str())));
        }
        if feature.contains(t) {
            return Err(invalid("feature", format!("the target {t} cannot also be a feature")));
        }
    }

    let num_classes = match f.unsigned("num_classes")? {
        Some(n) if n < 2 => return Err(invalid("num_classes", "must be at least 2")),
        Some(n) => Some(n as usize),
        None if task_type.is_classification() => return Err(TaskError::MissingField("num_classes".into())),
        None => None,
    };

    let split = if task_type == TaskType::TimeDependentLinkPrediction {
        let time_attribute = f.path("time_attribute")?.ok_or_else(|| TaskError::MissingField("time_attribute".into()))?;
        if time_attribute.level != Level::Edge {
            return Err(invalid("time_attribute", "must be an edge attribute"));
        }
        let val_time = f.number("val_time")?.ok_or_else(|| TaskError::MissingField("val_time".into()))?;
        let test_time = f.number("test_time")?.ok_or_else(|| TaskError::MissingField("test_time".into()))?;
        if val_time > test_time {
            return Err(invalid("val_time", "must not exceed test_time"));
        }
        SplitSpec::Temporal {
            time_attribute,
            val_time,
            test_time,
        }
    } else if obj.contains_key("train_set") || obj.contains_key("val_set") || obj.contains_key("test_set") {
        let set = |key: &str| -> Result<SplitSet, TaskError> {
            Ok(SplitSet {
                source: f.data_ref(key)?.ok_or_else(|| TaskError::MissingField(key.to_string()))?,
                data: None,
            })
        };
        SplitSpec::Fixed {
            train: set("train_set")?,
            val: set("val_set")?,
            test: set("test_set")?,
        }
    } else if obj.contains_key("train_ratio") {
        let ratio = |key: &str| -> Result<f64, TaskError> {
            let r = f.number(key)?.ok_or_else(|| TaskError::MissingField(key.to_string()))?;
            if r.is_nan() || r < 0.0 {
                return Err(invalid(key, "ratios must be non-negative"));
            }
            Ok(r)
        };
        let ratios = [ratio("train_ratio")?, ratio("val_ratio")?, ratio("test_ratio")?];
        let sum: f64 = ratios.iter().sum();
        if sum > 1.0 + 1e-9 {
            return Err(TaskError::BadRatio { sum });
        }
        let num_splits = f.unsigned("num_splits")?.unwrap_or(1);
        if num_splits == 0 {
            return Err(invalid("num_splits", "must be positive"));
        }
        SplitSpec::Random {
            ratios,
            seed: f.unsigned("seed")?.unwrap_or(0),
            num_splits: num_splits as usize,
        }
    } else {
        return Err(TaskError::MissingField("train_set".into()));
    };

    let prediction_slot = match task_type {
        TaskType::KGEntityPrediction => Some(match f.string("prediction_slot")?.as_deref() {
            None | Some("tail") => PredictionSlot::Tail,
            Some("head") => PredictionSlot::Head,
            Some(other) => return Err(invalid("prediction_slot", format!("{other:?} is not head or tail"))),
        }),
        TaskType::KGRelationPrediction => match f.string("prediction_slot")?.as_deref() {
            None | Some("relation") => Some(PredictionSlot::Relation),
            Some(other) => return Err(invalid("prediction_slot", format!("{other:?} is not relation"))),
        },
        _ => None,
    };

    Ok(TaskConfig {
        task_type,
        description,
        feature,
        target,
        num_classes,
        split,
        val_neg: f.data_ref("val_neg")?,
        test_neg: f.data_ref("test_neg")?,
        prediction_slot,
    })
}

/// Parses `dir/<file_name>` and loads any fixed split arrays it references.
pub fn load_task(dir: impl AsRef<Path>, file_name: &str) -> Result<TaskConfig, TaskError> {
    let dir = dir.as_ref();
    let mut task = parse_task(&std::fs::read_to_string(dir.join(file_name))?)?;
    let mut loader = DataLoader::new(dir);
    attach_split_data(&mut task, &mut loader)?;
    Ok(task)
}

/// Loads the arrays behind fixed split references.
pub fn attach_split_data(task: &mut TaskConfig, loader: &mut DataLoader) -> Result<(), TaskError> {
    if let SplitSpec::Fixed { train, val, test } = &mut task.split {
        for (name, set) in [("train_set", train), ("val_set", val), ("test_set", test)] {
            if set.data.is_none() {
                set.data = Some(loader.load_dense(&set.source, &format!("/{name}"))?);
            }
        }
    }
    Ok(())
}

/// Number of entities a task ranges over in `graph`.
pub fn entity_count(task: &TaskConfig, graph: &GraphStorage) -> Result<usize, TaskError> {
    if let Some(t) = &task.target {
        if let Some((_, n)) = graph.attribute(t) {
            return Ok(n);
        }
        return Err(TaskError::MissingAttribute(t.to_string()));
    }
    Ok(match task.task_type.entity_kind() {
        EntityKind::Node => graph.num_nodes(),
        EntityKind::Edge => graph.num_edges(),
        EntityKind::Graph => graph.num_graphs(),
    })
}

/// Resolves the first split of `task` over `graph`.
pub fn resolve_splits(task: &TaskConfig, graph: &GraphStorage) -> Result<SplitMasks, TaskError> {
    resolve_split(task, graph, 0)
}

/// Resolves split `index`; only random splits define more than one.
pub fn resolve_split(task: &TaskConfig, graph: &GraphStorage, index: usize) -> Result<SplitMasks, TaskError> {
    if index >= task.num_splits() {
        return Err(TaskError::NoSuchSplit {
            index,
            count: task.num_splits(),
        });
    }
    let n = entity_count(task, graph)?;
    let kind = task.task_type.entity_kind().as_str();
    match &task.split {
        SplitSpec::Fixed { train, val, test } => {
            let names = ["train_set", "val_set", "test_set"];
            let mut masks = Vec::with_capacity(3);
            for (name, set) in names.into_iter().zip([train, val, test]) {
                let data = set.data.as_ref().ok_or(TaskError::SplitNotLoaded(name))?;
                masks.push(set_mask(name, data, n, kind)?);
            }
            let test = masks.pop().expect("three sets");
            let val = masks.pop().expect("three sets");
            let train = masks.pop().expect("three sets");
            let masks = SplitMasks { train, val, test };
            check_disjoint(&masks)?;
            Ok(masks)
        }
        SplitSpec::Random { ratios, seed, .. } => Ok(random_split(n, *ratios, seed.wrapping_add(index as u64))),
        SplitSpec::Temporal {
            time_attribute,
            val_time,
            test_time,
        } => {
            let (attr, m) = graph
                .attribute(time_attribute)
                .ok_or_else(|| TaskError::MissingAttribute(time_attribute.to_string()))?;
            let times = match &attr.tensor {
                Tensor::Dense(a) if a.ndim() == 1 => a.to_f64_vec(),
                _ => return Err(invalid("time_attribute", "must be a 1-D dense attribute")),
            };
            if m != n {
                return Err(invalid("time_attribute", "must belong to the edge group of the task"));
            }
            Ok(SplitMasks {
                train: times.iter().map(|&t| t < *val_time).collect(),
                val: times.iter().map(|&t| t >= *val_time && t < *test_time).collect(),
                test: times.iter().map(|&t| t >= *test_time).collect(),
            })
        }
    }
}

fn set_mask(name: &'static str, data: &DenseArray, n: usize, kind: &'static str) -> Result<Vec<bool>, TaskError> {
    if data.ndim() != 1 {
        return Err(invalid(name, "split sets must be one-dimensional"));
    }
    let mut mask = vec![false; n];
    if data.dtype() == crate::tensor::DType::Bool {
        if data.len() != n {
            return Err(TaskError::IndexOutOfRange {
                set: name,
                index: data.len() as i64 - 1,
                bound: n,
                kind,
            });
        }
        for (m, v) in mask.iter_mut().zip(data.to_vec::<bool>().expect("bool dtype")) {
            *m = v;
        }
    } else {
        let ids = data
            .to_i64_vec()
            .ok_or_else(|| invalid(name, "split sets hold integer indices or a boolean mask"))?;
        for id in ids {
            if id < 0 || id as u64 >= n as u64 {
                return Err(TaskError::IndexOutOfRange {
                    set: name,
                    index: id,
                    bound: n,
                    kind,
                });
            }
            if std::mem::replace(&mut mask[id as usize], true) {
                return Err(TaskError::DuplicateIndex { set: name, index: id });
            }
        }
    }
    if !mask.contains(&true) {
        return Err(TaskError::EmptySplit(name));
    }
    Ok(mask)
}

fn check_disjoint(m: &SplitMasks) -> Result<(), TaskError> {
    let pairs = [
        ("train_set", &m.train, "val_set", &m.val),
        ("train_set", &m.train, "test_set", &m.test),
        ("val_set", &m.val, "test_set", &m.test),
    ];
    for (a, x, b, y) in pairs {
        if let Some(index) = x.iter().zip(y).position(|(p, q)| *p && *q) {
            return Err(TaskError::OverlappingSplit {
                first: a,
                second: b,
                index,
            });
        }
    }
    Ok(())
}

/// Shuffles `0..n` with a seeded SplitMix64 stream and cuts the permutation
/// at `floor(ratio * n)` boundaries.
pub fn random_split(n: usize, ratios: [f64; 3], seed: u64) -> SplitMasks {
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut SplitMix64::seed_from_u64(seed));
    let cut = |r: f64| ((r * n as f64) + 1e-9).floor() as usize;
    let a = cut(ratios[0]).min(n);
    let b = (a + cut(ratios[1])).min(n);
    let c = (b + cut(ratios[2])).min(n);
    let mut masks = SplitMasks {
        train: vec![false; n],
        val: vec![false; n],
        test: vec![false; n],
    };
    ids[..a].iter().for_each(|&i| masks.train[i] = true);
    ids[a..b].iter().for_each(|&i| masks.val[i] = true);
    ids[b..c].iter().for_each(|&i| masks.test[i] = true);
    masks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_type_lists_supported() {
        let err = parse_task(r#"{"type": "EdgeRegression"}"#).unwrap_err();
        match err {
            TaskError::UnknownTaskType { supported, .. } => assert_eq!(supported.len(), 8),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn feature_may_not_contain_target() {
        let text = r#"{"type": "NodeRegression", "feature": ["Node/Y"], "target": "Node/Y",
                       "train_ratio": 0.5, "val_ratio": 0.2, "test_ratio": 0.3}"#;
        assert!(matches!(parse_task(text), Err(TaskError::InvalidField { .. })));
    }

    #[test]
    fn ratio_sum_above_one() {
        let text = r#"{"type": "LinkPrediction", "train_ratio": 0.8, "val_ratio": 0.2, "test_ratio": 0.2}"#;
        assert!(matches!(parse_task(text), Err(TaskError::BadRatio { .. })));
    }

    #[test]
    fn kg_slots() {
        let base = r#"{"type": "KGEntityPrediction", "target": "Edge/Relation", "train_ratio": 1, "val_ratio": 0, "test_ratio": 0"#;
        let t = parse_task(&format!("{base}}}")).unwrap();
        assert_eq!(t.prediction_slot, Some(PredictionSlot::Tail));
        let t = parse_task(&format!("{base}, \"prediction_slot\": \"head\"}}")).unwrap();
        assert_eq!(t.prediction_slot, Some(PredictionSlot::Head));
        assert!(parse_task(&format!("{base}, \"prediction_slot\": \"relation\"}}")).is_err());
    }

    #[test]
    fn random_split_sizes_and_disjointness() {
        let m = random_split(10, [0.6, 0.2, 0.2], 3);
        assert_eq!(m.sizes(), [6, 2, 2]);
        assert!((0..10).all(|i| [m.train[i], m.val[i], m.test[i]].iter().filter(|&&b| b).count() == 1));
        assert_ne!(random_split(10, [0.6, 0.2, 0.2], 4), m);
    }
}
