//! Dataset checks with machine-readable findings.
//!
//! Every defect becomes a [`Finding`]; checking never stops at the first
//! problem. Checks that depend on data which already failed to load are
//! skipped, so one defect produces one finding rather than a cascade.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use crate::graph::{assemble, parse_metadata, AttrPath, DataLoader, GraphError, GraphSchema, GraphStorage};
use crate::task::{attach_split_data, parse_task, resolve_split, TaskConfig, TaskError};
use crate::tensor::{DataRef, Tensor, TensorError};
use crate::view::{combine_graph_and_task, task_files};

macro_rules! codes {
    ($($variant:ident => $text:literal,)*) => {
        /// Stable identifiers of finding kinds.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }
        }
    };
}

codes! {
    MissingMetadata => "MISSING_METADATA",
    InvalidJson => "INVALID_JSON",
    SchemaError => "SCHEMA_ERROR",
    DuplicateGroup => "DUPLICATE_GROUP",
    UnsafePath => "UNSAFE_PATH",
    MissingDataFile => "MISSING_DATA_FILE",
    MissingKey => "MISSING_KEY",
    BadMagic => "BAD_MAGIC",
    UnsupportedDtype => "UNSUPPORTED_DTYPE",
    UnsupportedLayout => "UNSUPPORTED_LAYOUT",
    TruncatedPayload => "TRUNCATED_PAYLOAD",
    InconsistentSparse => "INCONSISTENT_SPARSE",
    MalformedArray => "MALFORMED_ARRAY",
    DtypeMismatch => "DTYPE_MISMATCH",
    ShapeMismatch => "SHAPE_MISMATCH",
    DanglingEdge => "DANGLING_EDGE",
    NoTask => "NO_TASK",
    UnknownTaskType => "UNKNOWN_TASK_TYPE",
    MissingNumClasses => "MISSING_NUM_CLASSES",
    TaskInvalid => "TASK_INVALID",
    MissingAttribute => "MISSING_ATTRIBUTE",
    SplitOverlap => "SPLIT_OVERLAP",
    SplitOutOfRange => "SPLIT_OUT_OF_RANGE",
    SplitEmpty => "SPLIT_EMPTY",
    SplitDuplicate => "SPLIT_DUPLICATE",
    LabelOutOfRange => "LABEL_OUT_OF_RANGE",
    LabelNan => "LABEL_NAN",
    ViewConstructionFailed => "VIEW_CONSTRUCTION_FAILED",
    NoReadme => "NO_README",
    NoLicense => "NO_LICENSE",
    NoUrls => "NO_URLS",
    InvalidUrls => "INVALID_URLS",
    UnhostedData => "UNHOSTED_DATA",
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: Code,
    /// File name, followed by `#` and a JSON pointer when the locus is a
    /// field inside a JSON document.
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    fn new(mut findings: Vec<Finding>) -> Self {
        findings.sort_by(|a, b| (a.code, &a.path, &a.message).cmp(&(b.code, &b.path, &b.message)));
        findings.dedup();
        let passed = findings.iter().all(|f| f.severity != Severity::Error);
        ValidationReport { passed, findings }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn error_codes(&self) -> Vec<Code> {
        self.errors().map(|f| f.code).collect()
    }

    pub fn has(&self, code: Code) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            let sev = match f.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            out.push_str(&format!("{sev}[{}] {}: {}\n", f.code, f.path, f.message));
        }
        let errors = self.errors().count();
        let warnings = self.findings.len() - errors;
        out.push_str(&format!(
            "{}: {errors} error(s), {warnings} warning(s)\n",
            if self.passed { "PASSED" } else { "FAILED" }
        ));
        out
    }
}

struct Findings(Vec<Finding>);

impl Findings {
    fn error(&mut self, code: Code, path: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Error, code, path, message);
    }

    fn warning(&mut self, code: Code, path: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Warning, code, path, message);
    }

    fn push(&mut self, severity: Severity, code: Code, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Finding {
            severity,
            code,
            path: path.into(),
            message: message.into(),
        });
    }
}

fn locus(file: &str, pointer: &str) -> String {
    if pointer.is_empty() {
        file.to_string()
    } else {
        format!("{file}#{pointer}")
    }
}

fn tensor_code(e: &TensorError) -> Code {
    match e {
        TensorError::BadMagic => Code::BadMagic,
        TensorError::UnsupportedDtype(_) => Code::UnsupportedDtype,
        TensorError::UnsupportedLayout => Code::UnsupportedLayout,
        TensorError::TruncatedPayload { .. } => Code::TruncatedPayload,
        TensorError::MissingKey(_) => Code::MissingKey,
        TensorError::InconsistentSparse(_) => Code::InconsistentSparse,
        TensorError::DtypeMismatch { .. } => Code::DtypeMismatch,
        TensorError::InvalidRef(_) => Code::UnsafePath,
        TensorError::UnsupportedVersion(..)
        | TensorError::MalformedHeader(_)
        | TensorError::BadContainer(_)
        | TensorError::ElementCount { .. }
        | TensorError::Io(_) => Code::MalformedArray,
    }
}

/// Finding code for a graph loading error.
pub fn graph_code(e: &GraphError) -> Code {
    match e {
        GraphError::MissingMetadata(_) => Code::MissingMetadata,
        GraphError::Json(_) => Code::InvalidJson,
        GraphError::Schema { .. } => Code::SchemaError,
        GraphError::DuplicateGroup { .. } => Code::DuplicateGroup,
        GraphError::UnsafePath { .. } => Code::UnsafePath,
        GraphError::MissingDataFile { .. } => Code::MissingDataFile,
        GraphError::Tensor { source, .. } => tensor_code(source),
        GraphError::Malformed { .. } | GraphError::Io(_) => Code::MalformedArray,
        GraphError::DanglingEdge { .. } => Code::DanglingEdge,
        GraphError::ShapeMismatch { .. } => Code::ShapeMismatch,
        GraphError::DtypeMismatch { .. } => Code::DtypeMismatch,
    }
}

/// Finding code for a task error.
pub fn task_code(e: &TaskError) -> Code {
    match e {
        TaskError::Json(_) => Code::InvalidJson,
        TaskError::UnknownTaskType { .. } => Code::UnknownTaskType,
        TaskError::MissingField(f) if f == "num_classes" => Code::MissingNumClasses,
        TaskError::MissingField(_)
        | TaskError::InvalidField { .. }
        | TaskError::BadRatio { .. }
        | TaskError::SplitNotLoaded(_)
        | TaskError::NoSuchSplit { .. }
        | TaskError::Io(_) => Code::TaskInvalid,
        TaskError::IndexOutOfRange { .. } => Code::SplitOutOfRange,
        TaskError::OverlappingSplit { .. } => Code::SplitOverlap,
        TaskError::EmptySplit(_) => Code::SplitEmpty,
        TaskError::DuplicateIndex { .. } => Code::SplitDuplicate,
        TaskError::MissingAttribute(_) => Code::MissingAttribute,
        TaskError::Graph(g) => graph_code(g),
    }
}

fn task_pointer(e: &TaskError) -> String {
    match e {
        TaskError::MissingField(f) | TaskError::InvalidField { field: f, .. } if !f.starts_with('/') => format!("/{f}"),
        TaskError::InvalidField { field, .. } => field.clone(),
        TaskError::IndexOutOfRange { set, .. } | TaskError::DuplicateIndex { set, .. } => format!("/{set}"),
        TaskError::EmptySplit(set) | TaskError::SplitNotLoaded(set) => format!("/{set}"),
        TaskError::OverlappingSplit { second, .. } => format!("/{second}"),
        TaskError::BadRatio { .. } => "/train_ratio".into(),
        TaskError::UnknownTaskType { .. } => "/type".into(),
        TaskError::Graph(g) => g.pointer().unwrap_or_default().to_string(),
        _ => String::new(),
    }
}

/// Pointer of an attribute's entry in `metadata.json`.
fn attribute_pointer(path: &AttrPath) -> String {
    match &path.group {
        Some(g) => format!("/data/{}/{}/{}", path.level.as_str(), g, path.name),
        None => format!("/data/{}/{}", path.level.as_str(), path.name),
    }
}

struct Parsed {
    schema: Option<GraphSchema>,
    tasks: Vec<(String, Result<TaskConfig, TaskError>)>,
}

fn parse_all(dir: &Path, out: &mut Findings) -> io::Result<Parsed> {
    if !dir.is_dir() {
        return Err(io::Error::new(
            io::ErrorKind::NotFound,
            format!("{} is not a directory", dir.display()),
        ));
    }
    let meta = dir.join("metadata.json");
    let schema = if !meta.is_file() {
        out.error(Code::MissingMetadata, "metadata.json", "metadata.json is missing");
        None
    } else {
        match parse_metadata(&fs::read_to_string(&meta)?) {
            Ok(s) => Some(s),
            Err(e) => {
                out.error(graph_code(&e), locus("metadata.json", e.pointer().unwrap_or("")), e.to_string());
                None
            }
        }
    };
    let mut tasks = Vec::new();
    for name in task_files(dir)? {
        let parsed = parse_task(&fs::read_to_string(dir.join(&name))?);
        if let Err(e) = &parsed {
            out.error(task_code(e), locus(&name, &task_pointer(e)), e.to_string());
        }
        tasks.push((name, parsed));
    }
    if tasks.is_empty() {
        out.error(Code::NoTask, "task_*.json", "the dataset defines no task file");
    }
    Ok(Parsed { schema, tasks })
}

fn task_refs(task: &TaskConfig) -> Vec<&DataRef> {
    let mut refs = Vec::new();
    if let crate::task::SplitSpec::Fixed { train, val, test } = &task.split {
        refs.extend([&train.source, &val.source, &test.source]);
    }
    refs.extend(task.val_neg.iter().chain(&task.test_neg));
    refs
}

fn auxiliary_checks(dir: &Path, parsed: &Parsed, out: &mut Findings) -> io::Result<()> {
    if !dir.join("README.md").is_file() {
        out.warning(Code::NoReadme, "README.md", "README.md is missing");
    }
    if !dir.join("LICENSE").is_file() {
        out.warning(Code::NoLicense, "LICENSE", "LICENSE is missing; the dataset has no explicit license");
    }
    let urls_path = dir.join("urls.json");
    if !urls_path.is_file() {
        out.warning(Code::NoUrls, "urls.json", "urls.json is missing");
        return Ok(());
    }
    let urls: BTreeMap<String, String> = match serde_json::from_str::<Value>(&fs::read_to_string(urls_path)?) {
        Ok(Value::Object(map)) if map.values().all(Value::is_string) => map
            .into_iter()
            .map(|(k, v)| (k, v.as_str().unwrap_or_default().to_string()))
            .collect(),
        _ => {
            out.error(Code::InvalidUrls, "urls.json", "urls.json must be a flat object mapping file names to URLs");
            return Ok(());
        }
    };
    let mut files: BTreeSet<&str> = BTreeSet::new();
    if let Some(schema) = &parsed.schema {
        files.extend(schema.data_refs().into_iter().map(|(r, _)| r.file.as_str()));
    }
    for (_, task) in &parsed.tasks {
        if let Ok(t) = task {
            files.extend(task_refs(t).into_iter().map(|r| r.file.as_str()));
        }
    }
    for file in files {
        let base = file.rsplit('/').next().unwrap_or(file);
        if !urls.contains_key(file) && !urls.contains_key(base) {
            out.error(
                Code::UnhostedData,
                locus("urls.json", &crate::json::pointer_join("", file)),
                format!("no URL is listed for data file {file:?}"),
            );
        }
    }
    Ok(())
}

/// Checks the presence and parseability of the files a dataset consists of:
/// metadata, task files, README, LICENSE and the URL map.
pub fn validate_file_set(dir: impl AsRef<Path>) -> io::Result<ValidationReport> {
    let dir = dir.as_ref();
    let mut out = Findings(Vec::new());
    let parsed = parse_all(dir, &mut out)?;
    auxiliary_checks(dir, &parsed, &mut out)?;
    Ok(ValidationReport::new(out.0))
}

/// Runs every check family over a dataset directory.
pub fn validate_dataset(dir: impl AsRef<Path>) -> io::Result<ValidationReport> {
    let dir = dir.as_ref();
    let mut out = Findings(Vec::new());
    let parsed = parse_all(dir, &mut out)?;
    auxiliary_checks(dir, &parsed, &mut out)?;

    let mut loader = DataLoader::new(dir);
    let mut graph: Option<Arc<GraphStorage>> = None;
    let mut failed = BTreeSet::new();
    if let Some(schema) = &parsed.schema {
        let assembly = assemble(schema, &mut loader);
        for e in &assembly.errors {
            out.error(graph_code(e), locus("metadata.json", e.pointer().unwrap_or("")), e.to_string());
        }
        graph = assembly.storage.map(Arc::new);
        failed = assembly.failed_attributes;
    }

    for (name, task) in parsed.tasks {
        let Ok(mut task) = task else { continue };
        check_task(name, &mut task, graph.as_ref(), parsed.schema.is_some(), &failed, &mut loader, &mut out);
    }
    Ok(ValidationReport::new(out.0))
}

fn check_task(
    name: String,
    task: &mut TaskConfig,
    graph: Option<&Arc<GraphStorage>>,
    has_schema: bool,
    failed: &BTreeSet<String>,
    loader: &mut DataLoader,
    out: &mut Findings,
) {
    let before = out.0.len();
    let report = |out: &mut Findings, e: &TaskError| {
        out.error(task_code(e), locus(&name, &task_pointer(e)), e.to_string());
    };
    if let Err(e) = attach_split_data(task, loader) {
        report(out, &e);
        return;
    }
    let Some(graph) = graph else { return };

    // attribute references; those that failed to load were already reported
    let mut paths: Vec<(&str, &AttrPath)> = task.feature.iter().map(|p| ("/feature", p)).collect();
    paths.extend(task.target.iter().map(|p| ("/target", p)));
    if let crate::task::SplitSpec::Temporal { time_attribute, .. } = &task.split {
        paths.push(("/time_attribute", time_attribute));
    }
    let mut blocked = false;
    for (field, path) in paths {
        if graph.attribute(path).is_some() {
            continue;
        }
        blocked = true;
        if has_schema && !failed.contains(&attribute_pointer(path)) {
            out.error(
                Code::MissingAttribute,
                locus(&name, field),
                format!("attribute {path} does not exist in the graph"),
            );
        }
    }
    if blocked {
        return;
    }

    for i in 0..task.num_splits() {
        if let Err(e) = resolve_split(task, graph, i) {
            report(out, &e);
            return;
        }
    }

    let n = graph.num_nodes() as i64;
    for (field, neg) in [("/val_neg", &task.val_neg), ("/test_neg", &task.test_neg)] {
        let Some(r) = neg else { continue };
        match loader.load_dense(r, field) {
            Err(e) => report(out, &TaskError::Graph(e)),
            Ok(a) => match (a.shape(), a.to_i64_vec()) {
                ([_, 2], Some(ids)) => {
                    if let Some(id) = ids.into_iter().find(|&id| id < 0 || id >= n) {
                        out.error(Code::DanglingEdge, locus(&name, field), format!("negative sample endpoint {id} outside the {n} nodes"));
                    }
                }
                _ => out.error(Code::MalformedArray, locus(&name, field), "negative samples must be a K x 2 integer array"),
            },
        }
    }

    if let (Some(k), Some(target)) = (task.num_classes, &task.target) {
        let (attr, _) = graph.attribute(target).expect("checked above");
        let values = match &attr.tensor {
            Tensor::Dense(a) => a.to_f64_vec(),
            Tensor::Sparse(_) => Vec::new(),
        };
        let nan = values.iter().filter(|v| v.is_nan()).count();
        if nan > 0 {
            out.warning(Code::LabelNan, locus(&name, "/target"), format!("{nan} label(s) of {target} are NaN"));
        }
        let bad: Vec<f64> = values
            .iter()
            .copied()
            .filter(|v| !v.is_nan() && (*v < 0.0 || *v >= k as f64 || v.fract() != 0.0))
            .collect();
        if let Some(first) = bad.first() {
            out.error(
                Code::LabelOutOfRange,
                locus(&name, "/target"),
                format!("{} label(s) of {target} fall outside [0, {k}); first offender {first}", bad.len()),
            );
        }
    }

    // structural stand-in for a short training run: build the view and pull
    // one batch of (features, target, mask)
    if out.0[before..].iter().any(|f| f.severity == Severity::Error) {
        return;
    }
    match combine_graph_and_task(Arc::clone(graph), task.clone()) {
        Ok(view) => {
            let batch = view.first_batch(32);
            let width = batch.features.first().map(Vec::len);
            if batch.features.iter().any(|r| Some(r.len()) != width) {
                out.error(Code::ViewConstructionFailed, name.as_str(), "feature rows of the first batch differ in width");
            }
        }
        Err(e) => out.error(Code::ViewConstructionFailed, name.as_str(), e.to_string()),
    }
}
