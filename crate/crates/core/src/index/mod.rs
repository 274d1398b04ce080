//! Corpus-level benchmark index: one record per dataset directory with its
//! task types, graph properties and citation chain, persisted as a single
//! schema-versioned JSON document.

mod citation;
mod convert;
mod query;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::metrics::{compute_all, dataset_graph, ApproxBudget, MetricReport};
use crate::task::TaskType;
use crate::validate::validate_dataset;
use crate::view::available_tasks;

pub use citation::{parse_citation, CitationChain};
pub use convert::{convert_edgelist, ConvertError, ConvertOptions};
pub use query::{query_index, render_table, Field, Filter, TableFormat, FILTER_GRAMMAR};

/// Version of the index document layout.
pub const SCHEMA_VERSION: u64 = 1;
/// Version of the dataset format the records were checked against.
pub const FORMAT_VERSION: &str = "1.0";

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("filter parse error at offset {offset}: {message}")]
    FilterParse { offset: usize, message: String },
    #[error("unknown field {0:?}")]
    UnknownField(String),
    #[error("malformed index: {0}")]
    BadIndex(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IndexError {
    pub fn is_usage(&self) -> bool {
        matches!(self, IndexError::FilterParse { .. } | IndexError::UnknownField(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexRecord {
    /// Name of the dataset directory.
    pub id: String,
    pub path: String,
    /// Task types with a parseable task file, in canonical order.
    pub tasks: Vec<TaskType>,
    /// `None` when validation failed.
    pub metrics: Option<MetricReport>,
    pub citation: CitationChain,
    pub passed: bool,
    /// Distinct error codes found by validation.
    pub errors: Vec<String>,
    pub format_version: String,
    /// Seconds since the Unix epoch; `None` for deterministic builds.
    pub indexed_at: Option<u64>,
}

impl IndexRecord {
    pub fn has_task(&self, t: TaskType) -> bool {
        self.tasks.contains(&t)
    }

    pub fn to_json_value(&self) -> Json {
        json!({
            "id": self.id,
            "path": self.path,
            "tasks": self.tasks.iter().map(|t| t.as_str()).collect::<Vec<_>>(),
            "metrics": self.metrics.as_ref().map(MetricReport::to_json_value),
            "citation": self.citation,
            "passed": self.passed,
            "errors": self.errors,
            "format_version": self.format_version,
            "indexed_at": self.indexed_at,
        })
    }

    pub fn from_json_value(v: &Json) -> Result<Self, IndexError> {
        let bad = |m: &str| IndexError::BadIndex(m.to_string());
        let text = |key: &str| {
            v.get(key)
                .and_then(Json::as_str)
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("record field {key:?} must be a string")))
        };
        let tasks = v
            .get("tasks")
            .and_then(Json::as_array)
            .ok_or_else(|| bad("record field \"tasks\" must be a list"))?
            .iter()
            .map(|t| t.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| bad(&format!("unknown task type {t}"))))
            .collect::<Result<Vec<TaskType>, _>>()?;
        let metrics = match v.get("metrics") {
            None | Some(Json::Null) => None,
            Some(m) => Some(MetricReport::from_json_value(m).map_err(|e| bad(&e.to_string()))?),
        };
        let citation = serde_json::from_value(v.get("citation").cloned().unwrap_or(Json::Null))
            .map_err(|e| bad(&format!("citation: {e}")))?;
        let errors = serde_json::from_value(v.get("errors").cloned().unwrap_or(Json::Null))
            .map_err(|e| bad(&format!("errors: {e}")))?;
        let indexed_at = match v.get("indexed_at") {
            None | Some(Json::Null) => None,
            Some(t) => Some(t.as_u64().ok_or_else(|| bad("indexed_at must be a non-negative integer"))?),
        };
        Ok(IndexRecord {
            id: text("id")?,
            path: text("path")?,
            tasks,
            metrics,
            citation,
            passed: v.get("passed").and_then(Json::as_bool).ok_or_else(|| bad("passed must be a boolean"))?,
            errors,
            format_version: text("format_version")?,
            indexed_at,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexDatabase {
    pub schema_version: u64,
    /// Budget every record's metrics were computed with.
    pub budget: ApproxBudget,
    /// Sorted by id.
    pub records: Vec<IndexRecord>,
}

impl IndexDatabase {
    pub fn get(&self, id: &str) -> Option<&IndexRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "schema_version": self.schema_version,
            "budget": self.budget,
            "records": self.records.iter().map(IndexRecord::to_json_value).collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("index serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, IndexError> {
        let doc: Json = serde_json::from_str(text).map_err(|e| IndexError::BadIndex(e.to_string()))?;
        let schema_version = doc
            .get("schema_version")
            .and_then(Json::as_u64)
            .ok_or_else(|| IndexError::BadIndex("missing schema_version".into()))?;
        if schema_version != SCHEMA_VERSION {
            return Err(IndexError::BadIndex(format!("unsupported schema version {schema_version}")));
        }
        let budget = serde_json::from_value(doc.get("budget").cloned().unwrap_or(Json::Null))
            .map_err(|e| IndexError::BadIndex(format!("budget: {e}")))?;
        let records = doc
            .get("records")
            .and_then(Json::as_array)
            .ok_or_else(|| IndexError::BadIndex("missing records".into()))?
            .iter()
            .map(IndexRecord::from_json_value)
            .collect::<Result<Vec<_>, _>>()?;
        for pair in records.windows(2) {
            if pair[0].id >= pair[1].id {
                return Err(IndexError::BadIndex(format!("record ids out of order or repeated at {:?}", pair[1].id)));
            }
        }
        Ok(IndexDatabase {
            schema_version,
            budget,
            records,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IndexError> {
        IndexDatabase::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IndexError> {
        Ok(fs::write(path, self.to_json())?)
    }
}

fn index_one(dir: &Path, id: String, budget: &ApproxBudget, deterministic: bool) -> IndexRecord {
    let mut tasks: Vec<TaskType> = available_tasks(dir)
        .map(|ts| ts.into_iter().map(|(_, t)| t).collect())
        .unwrap_or_default();
    tasks.sort();
    tasks.dedup();
    let citation = fs::read_to_string(dir.join("README.md"))
        .map(|text| parse_citation(&text))
        .unwrap_or_default();
    let (mut passed, mut errors) = match validate_dataset(dir) {
        Ok(report) => {
            let mut codes: Vec<String> = report.error_codes().iter().map(|c| c.as_str().to_string()).collect();
            codes.dedup();
            (report.passed, codes)
        }
        Err(e) => (false, vec![format!("IO_ERROR: {e}")]),
    };
    let mut metrics = None;
    if passed {
        match dataset_graph(dir) {
            Ok(g) => {
                let report = compute_all(&g, budget);
                metrics = Some(if deterministic { report.without_timings() } else { report });
            }
            Err(e) => {
                passed = false;
                errors.push(format!("METRICS_FAILED: {e}"));
            }
        }
    }
    IndexRecord {
        id,
        path: dir.display().to_string(),
        tasks,
        metrics,
        citation,
        passed,
        errors,
        format_version: FORMAT_VERSION.to_string(),
        indexed_at: (!deterministic).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        }),
    }
}

/// Indexes every child directory of `root` whose name does not start with
/// a dot. Datasets failing validation are kept with `passed = false` and no
/// metrics. Directories are processed in parallel; records come out sorted
/// by id. With `deterministic`, timings and timestamps are left out so an
/// unchanged corpus always yields the same document.
pub fn build_index(root: impl AsRef<Path>, budget: &ApproxBudget, deterministic: bool) -> Result<IndexDatabase, IndexError> {
    let root = root.as_ref();
    let mut dirs: Vec<(String, PathBuf)> = Vec::new();
    for entry in fs::read_dir(root)? {
        let entry = entry?;
        if !entry.file_type()?.is_dir() {
            continue;
        }
        if let Ok(name) = entry.file_name().into_string() {
            if !name.starts_with('.') {
                dirs.push((name, entry.path()));
            }
        }
    }
    dirs.sort();
    let records = dirs
        .into_par_iter()
        .map(|(id, dir)| index_one(&dir, id, budget, deterministic))
        .collect();
    Ok(IndexDatabase {
        schema_version: SCHEMA_VERSION,
        budget: *budget,
        records,
    })
}
