//! Graph data properties.
//!
//! [`compute_all`] evaluates the whole catalogue on a [`LabeledGraph`].
//! Distance and connectivity metrics switch from exact algorithms to seeded
//! sampling once the graph exceeds the thresholds of an [`ApproxBudget`];
//! every entry records which mode produced it.

mod attribute;
mod basic;
mod clustering;
mod connectivity;
mod distance;
mod distribution;
mod graph;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::graph::{load_graph, GraphError};
use crate::task::{load_task, TaskError, TaskType};
use crate::view::available_tasks;

pub use attribute::homophily_measure;
pub use basic::degree_assortativity;
pub use clustering::coreness;
pub use distance::pseudo_diameter;
pub use distribution::gini;
pub use graph::{Adjacency, LabeledGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Basic,
    Distance,
    Connectivity,
    Clustering,
    Distribution,
    Attribute,
}

impl Group {
    pub const ALL: [Group; 6] = [
        Group::Basic,
        Group::Distance,
        Group::Connectivity,
        Group::Clustering,
        Group::Distribution,
        Group::Attribute,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Basic => "Basic",
            Group::Distance => "Distance",
            Group::Connectivity => "Connectivity",
            Group::Clustering => "Clustering",
            Group::Distribution => "Distribution",
            Group::Attribute => "Attribute",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Group::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown metric group {s:?}"))
    }
}

/// Every metric name in report order, with its group.
pub const CATALOGUE: [(&str, Group); 27] = [
    ("is_directed", Group::Basic),
    ("num_nodes", Group::Basic),
    ("num_edges", Group::Basic),
    ("edge_density", Group::Basic),
    ("average_degree", Group::Basic),
    ("edge_reciprocity", Group::Basic),
    ("degree_assortativity", Group::Basic),
    ("diameter", Group::Distance),
    ("pseudo_diameter", Group::Distance),
    ("average_shortest_path_length", Group::Distance),
    ("global_efficiency", Group::Distance),
    ("relative_lcc_size", Group::Connectivity),
    ("relative_lscc_size", Group::Connectivity),
    ("average_node_connectivity", Group::Connectivity),
    ("average_clustering_coefficient", Group::Clustering),
    ("transitivity", Group::Clustering),
    ("degeneracy", Group::Clustering),
    ("power_law_exponent", Group::Distribution),
    ("pareto_exponent", Group::Distribution),
    ("gini_degree", Group::Distribution),
    ("gini_coreness", Group::Distribution),
    ("edge_homogeneity", Group::Attribute),
    ("average_within_class_angular_similarity", Group::Attribute),
    ("average_between_class_angular_similarity", Group::Attribute),
    ("feature_angular_snr", Group::Attribute),
    ("homophily_measure", Group::Attribute),
    ("attribute_assortativity", Group::Attribute),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approximate,
    Skipped,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Approximate => "approximate",
            Mode::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    /// NaN marks an undefined value.
    Real(f64),
}

impl Value {
    pub const NAN: Value = Value::Real(f64::NAN);

    pub fn as_f64(self) -> f64 {
        match self {
            Value::Bool(b) => f64::from(u8::from(b)),
            Value::Int(i) => i as f64,
            Value::Real(x) => x,
        }
    }

    pub fn is_nan(self) -> bool {
        matches!(self, Value::Real(x) if x.is_nan())
    }

    pub fn to_json(self) -> Json {
        match self {
            Value::Bool(b) => Json::Bool(b),
            Value::Int(i) => Json::from(i),
            Value::Real(x) => serde_json::Number::from_f64(x).map_or(Json::Null, Json::Number),
        }
    }

    pub fn from_json(v: &Json) -> Option<Value> {
        match v {
            Json::Null => Some(Value::NAN),
            Json::Bool(b) => Some(Value::Bool(*b)),
            Json::Number(n) if n.is_i64() => n.as_i64().map(Value::Int),
            Json::Number(n) => n.as_f64().map(Value::Real),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Real(x) if x.is_nan() => f.write_str("NaN"),
            Value::Real(x) => write!(f, "{x:.6}"),
        }
    }
}

/// Bitwise equality for reals, so NaN entries compare equal.
fn same_value(a: Value, b: Value) -> bool {
    match (a, b) {
        (Value::Real(x), Value::Real(y)) => x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()),
        _ => a == b,
    }
}

/// Thresholds beyond which exact algorithms give way to sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxBudget {
    /// Largest node count for all-pairs shortest paths.
    pub exact_n: usize,
    /// Largest number of non-adjacent pairs for exact node connectivity.
    pub exact_pairs: usize,
    pub bfs_sources: usize,
    pub sample_pairs: usize,
    pub seed: u64,
}

impl Default for ApproxBudget {
    fn default() -> Self {
        ApproxBudget {
            exact_n: 1000,
            exact_pairs: 10_000,
            bfs_sources: 256,
            sample_pairs: 2048,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MetricResult {
    pub group: Group,
    pub value: Value,
    pub mode: Mode,
    /// Seconds spent in the computation step that produced this value.
    pub elapsed: f64,
    pub note: Option<String>,
}

impl PartialEq for MetricResult {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group
            && same_value(self.value, other.value)
            && self.mode == other.mode
            && self.elapsed.to_bits() == other.elapsed.to_bits()
            && self.note == other.note
    }
}

/// One computed value before timing is attached.
#[derive(Debug, Clone)]
pub(crate) struct Entry {
    name: &'static str,
    value: Value,
    mode: Mode,
    note: Option<String>,
}

impl Entry {
    pub(crate) fn exact(name: &'static str, value: Value) -> Self {
        Entry { name, value, mode: Mode::Exact, note: None }
    }

    pub(crate) fn real(name: &'static str, x: f64) -> Self {
        Entry::exact(name, Value::Real(x))
    }

    pub(crate) fn skipped(name: &'static str, note: impl Into<String>) -> Self {
        Entry { name, value: Value::NAN, mode: Mode::Skipped, note: Some(note.into()) }
    }

    pub(crate) fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub(crate) fn note_if(self, cond: bool, note: impl Into<String>) -> Self {
        if cond {
            self.note(note)
        } else {
            self
        }
    }
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("malformed metric report: {0}")]
    BadReport(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MetricsError {
    pub fn code(&self) -> &'static str {
        match self {
            MetricsError::Graph(e) => e.code(),
            MetricsError::Task(e) => e.code(),
            MetricsError::BadReport(_) => "BadReport",
            MetricsError::Io(_) => "IoError",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    results: BTreeMap<String, MetricResult>,
    pub budget: ApproxBudget,
}

impl MetricReport {
    pub fn get(&self, name: &str) -> Option<&MetricResult> {
        self.results.get(name)
    }

    /// The metric's value as a float; NaN when absent.
    pub fn value(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |r| r.value.as_f64())
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    /// Entries in catalogue order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &MetricResult)> {
        CATALOGUE
            .iter()
            .filter_map(|(name, _)| self.results.get(*name).map(|r| (*name, r)))
    }

    /// Zeroes all timings, making the report a pure function of its inputs.
    pub fn without_timings(mut self) -> Self {
        for r in self.results.values_mut() {
            r.elapsed = 0.0;
        }
        self
    }

    pub fn to_json_value(&self) -> Json {
        let mut metrics = Map::new();
        let mut details = Map::new();
        for (name, r) in self.iter() {
            metrics.insert(name.into(), r.value.to_json());
            details.insert(
                name.into(),
                json!({
                    "group": r.group.as_str(),
                    "mode": r.mode.as_str(),
                    "elapsed": r.elapsed,
                    "note": r.note,
                }),
            );
        }
        json!({
            "metrics": metrics,
            "details": details,
            "budget": self.budget,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }

    pub fn from_json_value(v: &Json) -> Result<Self, MetricsError> {
        let bad = |m: &str| MetricsError::BadReport(m.to_string());
        let metrics = v.get("metrics").and_then(Json::as_object).ok_or_else(|| bad("missing metrics"))?;
        let details = v.get("details").and_then(Json::as_object).ok_or_else(|| bad("missing details"))?;
        let budget = serde_json::from_value(v.get("budget").cloned().unwrap_or(Json::Null))
            .map_err(|e| MetricsError::BadReport(e.to_string()))?;
        let mut results = BTreeMap::new();
        for (name, value) in metrics {
            let value = Value::from_json(value).ok_or_else(|| bad(&format!("bad value for {name}")))?;
            let d = details.get(name).ok_or_else(|| bad(&format!("no details for {name}")))?;
            let group = d["group"].as_str().and_then(|g| g.parse().ok()).ok_or_else(|| bad("bad group"))?;
            let mode = serde_json::from_value(d["mode"].clone()).map_err(|_| bad("bad mode"))?;
            results.insert(
                name.clone(),
                MetricResult {
                    group,
                    value,
                    mode,
                    elapsed: d["elapsed"].as_f64().unwrap_or(0.0),
                    note: d["note"].as_str().map(str::to_string),
                },
            );
        }
        Ok(MetricReport { results, budget })
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Group | Metric | Value | Mode | Note |\n|---|---|---|---|---|\n");
        for (name, r) in self.iter() {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                r.group,
                name,
                r.value,
                r.mode.as_str(),
                r.note.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

/// Runs the selected metric groups.
pub fn compute(g: &LabeledGraph, budget: &ApproxBudget, groups: &[Group]) -> MetricReport {
    let mut results = BTreeMap::new();
    let mut record = |group: Group, start: Instant, entries: Vec<Entry>| {
        let elapsed = start.elapsed().as_secs_f64();
        for e in entries {
            results.insert(
                e.name.to_string(),
                MetricResult { group, value: e.value, mode: e.mode, elapsed, note: e.note },
            );
        }
    };
    for &group in Group::ALL.iter().filter(|g| groups.contains(g)) {
        match group {
            Group::Basic => {
                let t = Instant::now();
                record(group, t, basic::basic_properties(g));
            }
            Group::Distance => {
                let t = Instant::now();
                record(group, t, distance::distance_properties(g, budget));
            }
            Group::Connectivity => {
                let t = Instant::now();
                record(group, t, connectivity::component_sizes(g));
                let t = Instant::now();
                record(group, t, vec![connectivity::average_node_connectivity(g, budget)]);
            }
            Group::Clustering => {
                let t = Instant::now();
                record(group, t, clustering::clustering_properties(g));
            }
            Group::Distribution => {
                let t = Instant::now();
                record(group, t, distribution::distribution_properties(g));
            }
            Group::Attribute => {
                let t = Instant::now();
                record(group, t, attribute::attribute_properties(g));
            }
        }
    }
    MetricReport { results, budget: *budget }
}

/// Runs every group of the catalogue.
pub fn compute_all(g: &LabeledGraph, budget: &ApproxBudget) -> MetricReport {
    compute(g, budget, &Group::ALL)
}

/// The graph of a dataset directory, with labels and features taken from
/// its first node classification task when there is one.
pub fn dataset_graph(dir: impl AsRef<Path>) -> Result<LabeledGraph, MetricsError> {
    let dir = dir.as_ref();
    let graph = load_graph(dir)?;
    let task = available_tasks(dir)?
        .into_iter()
        .find(|(_, t)| *t == TaskType::NodeClassification);
    Ok(match task {
        Some((file, _)) => LabeledGraph::from_task(&graph, &load_task(dir, &file)?),
        None => LabeledGraph::from_storage(&graph),
    })
}

/// Pearson correlation; `None` when undefined (fewer than two pairs or
/// zero variance on either side).
pub(crate) fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_of_perfect_lines() {
        assert_eq!(pearson(&[(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)]), Some(1.0));
        assert_eq!(pearson(&[(1.0, 2.0), (2.0, 1.0)]), Some(-1.0));
        assert_eq!(pearson(&[(1.0, 2.0), (1.0, 1.0)]), None);
    }

    #[test]
    fn catalogue_names_are_unique() {
        let mut names: Vec<_> = CATALOGUE.iter().map(|c| c.0).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CATALOGUE.len());
    }

    #[test]
    fn report_json_round_trip() {
        let g = LabeledGraph::new(4, false, &[(0, 1), (1, 2), (2, 3)]);
        let report = compute_all(&g, &ApproxBudget::default());
        let back = MetricReport::from_json_value(&report.to_json_value()).unwrap();
        assert_eq!(back, report);
    }
}
