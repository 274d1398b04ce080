//! Conversion of a raw edge list (plus optional node features and labels)
//! into a dataset directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::graph::{write_graph, Attribute, Attributes, EdgeGroup, GraphError, GraphStorage, NodeGroup, GRAPH_DATA_FILE};
use crate::tensor::DenseArray;

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("{}: {message}", file.display())]
    RaggedInput { file: PathBuf, message: String },
    #[error("{}:{line}: {value:?} is not a non-negative integer node id", file.display())]
    NonIntegerId { file: PathBuf, line: u64, value: String },
    #[error("{}:{line}: {message}", file.display())]
    InvalidValue { file: PathBuf, line: u64, message: String },
    #[error("output directory {} already exists and is not empty", .0.display())]
    OutputExists(PathBuf),
    #[error("{}: {message}", file.display())]
    Csv { file: PathBuf, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default)]
pub struct ConvertOptions {
    /// Tab- or whitespace-separated `src dst` rows of integer ids. Blank
    /// lines, `#` comments and a leading `src dst` header are skipped.
    pub edges: PathBuf,
    /// CSV with one row of numbers per node, in id order.
    pub node_features: Option<PathBuf>,
    /// CSV with one non-negative integer class per node, in id order.
    pub node_labels: Option<PathBuf>,
    pub directed: bool,
    /// Dataset name used in the README; defaults to the output directory name.
    pub name: Option<String>,
    pub out_dir: PathBuf,
}

fn read_edges(path: &Path) -> Result<Vec<(u64, u64)>, ConvertError> {
    let text = fs::read_to_string(path)?;
    let mut edges = Vec::new();
    let mut seen_row = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let first = !std::mem::replace(&mut seen_row, true);
        if first && fields.len() == 2 && fields[0].eq_ignore_ascii_case("src") && fields[1].eq_ignore_ascii_case("dst") {
            continue;
        }
        if fields.len() != 2 {
            return Err(ConvertError::RaggedInput {
                file: path.to_path_buf(),
                message: format!("line {line_no} has {} column(s), expected 2 (src, dst)", fields.len()),
            });
        }
        let id = |s: &str| {
            s.parse::<u64>()
                .ok()
                .filter(|&v| v < i64::MAX as u64)
                .ok_or_else(|| ConvertError::NonIntegerId {
                    file: path.to_path_buf(),
                    line: line_no,
                    value: s.to_string(),
                })
        };
        edges.push((id(fields[0])?, id(fields[1])?));
    }
    Ok(edges)
}

/// Rows of a headerless or single-header CSV. A first row in which no
/// field parses as a number is taken as a header and skipped.
fn read_rows(path: &Path) -> Result<Vec<(u64, Vec<String>)>, ConvertError> {
    let csv_err = |e: csv::Error| ConvertError::Csv {
        file: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_string).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rows.is_empty() && fields.iter().all(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        rows.push((line, fields));
    }
    if let Some((_, first)) = rows.first() {
        let width = first.len();
        if let Some((line, row)) = rows.iter().find(|(_, r)| r.len() != width) {
            return Err(ConvertError::RaggedInput {
                file: path.to_path_buf(),
                message: format!("line {line} has {} column(s), expected {width}", row.len()),
            });
        }
    }
    Ok(rows)
}

fn check_rows(path: &Path, rows: usize, n: usize) -> Result<(), ConvertError> {
    if rows != n {
        return Err(ConvertError::RaggedInput {
            file: path.to_path_buf(),
            message: format!("{rows} row(s) for {n} node(s)"),
        });
    }
    Ok(())
}

fn read_features(path: &Path, n: usize) -> Result<DenseArray, ConvertError> {
    let rows = read_rows(path)?;
    check_rows(path, rows.len(), n)?;
    let width = rows.first().map_or(0, |(_, r)| r.len());
    let mut values = Vec::with_capacity(n * width);
    for (line, row) in rows {
        for field in row {
            let x = field.parse::<f64>().map_err(|_| ConvertError::InvalidValue {
                file: path.to_path_buf(),
                line,
                message: format!("{field:?} is not a number"),
            })?;
            values.push(x);
        }
    }
    Ok(DenseArray::from_vec(vec![n, width], values).expect("row-major values fill the shape"))
}

fn read_labels(path: &Path, n: usize) -> Result<Vec<i64>, ConvertError> {
    let rows = read_rows(path)?;
    if let Some((line, row)) = rows.iter().find(|(_, r)| r.len() != 1) {
        return Err(ConvertError::RaggedInput {
            file: path.to_path_buf(),
            message: format!("line {line} has {} column(s), expected 1 label", row.len()),
        });
    }
    check_rows(path, rows.len(), n)?;
    rows.into_iter()
        .map(|(line, row)| {
            row[0].parse::<i64>().ok().filter(|&y| y >= 0).ok_or_else(|| ConvertError::InvalidValue {
                file: path.to_path_buf(),
                line,
                message: format!("{:?} is not a non-negative integer class", row[0]),
            })
        })
        .collect()
}

const README_TEMPLATE: &str = "\
# {name}

## Dataset Description

Converted from `{source}`: {n} node(s), {m} edge(s), {kind}.
Describe where the data comes from and what nodes and edges represent.

## Citation

Add BibTeX entries in fenced code blocks under the headings below.

### Original Source

### Current Version

### Previous Versions
";

/// Writes a dataset directory from an edge list: `metadata.json`, the
/// graph data file, a random-split link prediction task, a random-split
/// node classification task when labels are given, a README template with
/// empty citation headings, and a `urls.json` stub with an empty URL per
/// data file. No LICENSE is written. The node count is the largest id plus
/// one; feature and label files must have exactly that many rows.
pub fn convert_edgelist(opts: &ConvertOptions) -> Result<PathBuf, ConvertError> {
    let out = &opts.out_dir;
    if out.exists() && fs::read_dir(out)?.next().is_some() {
        return Err(ConvertError::OutputExists(out.clone()));
    }
    let edges = read_edges(&opts.edges)?;
    let n = edges.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
    let m = edges.len();

    let mut attributes = Attributes::new();
    let features = opts.node_features.as_deref().map(|p| read_features(p, n)).transpose()?;
    let labels = opts.node_labels.as_deref().map(|p| read_labels(p, n)).transpose()?;
    if let Some(x) = features {
        attributes.insert(
            "NodeFeature".into(),
            Attribute {
                description: "Node features.".into(),
                ..Attribute::dense(x)
            },
        );
    }
    let num_classes = labels.as_ref().map(|y| (y.iter().copied().max().unwrap_or(0) as usize + 1).max(2));
    if let Some(y) = labels {
        attributes.insert(
            "NodeLabel".into(),
            Attribute {
                description: "Node class labels.".into(),
                ..Attribute::dense(DenseArray::vector(y))
            },
        );
    }
    let ids: Vec<i64> = edges.iter().flat_map(|&(u, v)| [u as i64, v as i64]).collect();
    let owner = (m > 0).then(|| "Node".to_string());
    let source = opts.edges.file_name().map_or_else(|| opts.edges.display().to_string(), |f| f.to_string_lossy().into_owned());
    let graph = GraphStorage {
        description: format!("Graph converted from {source}."),
        citation: None,
        directed: opts.directed,
        heterogeneous: false,
        node_groups: vec![NodeGroup {
            name: "Node".into(),
            offset: 0,
            count: n,
            attributes,
        }],
        edge_groups: vec![EdgeGroup {
            name: "Edge".into(),
            src_group: owner.clone(),
            dst_group: owner,
            edges: DenseArray::from_vec(vec![m, 2], ids).expect("two ids per edge"),
            attributes: Attributes::new(),
        }],
        graphs: None,
    };
    fs::create_dir_all(out)?;
    write_graph(&graph, out)?;

    let has_features = graph.node_groups[0].attributes.contains_key("NodeFeature");
    let feature: Vec<&str> = if has_features { vec!["Node/NodeFeature"] } else { Vec::new() };
    let write_json = |file: &str, value: serde_json::Value| -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
        text.push('\n');
        fs::write(out.join(file), text)
    };
    write_json(
        "task_link_prediction.json",
        json!({
            "description": "Predict held-out edges; edges are split at random.",
            "type": "LinkPrediction",
            "feature": feature,
            "train_ratio": 0.8,
            "val_ratio": 0.1,
            "test_ratio": 0.1,
            "num_splits": 1,
            "seed": 0,
        }),
    )?;
    if let Some(num_classes) = num_classes {
        write_json(
            "task_node_classification.json",
            json!({
                "description": "Predict the class of each node; nodes are split at random.",
                "type": "NodeClassification",
                "feature": feature,
                "target": "Node/NodeLabel",
                "num_classes": num_classes,
                "train_ratio": 0.6,
                "val_ratio": 0.2,
                "test_ratio": 0.2,
                "num_splits": 1,
                "seed": 0,
            }),
        )?;
    }
    write_json("urls.json", json!({ GRAPH_DATA_FILE: "" }))?;

    let name = opts.name.clone().unwrap_or_else(|| {
        out.file_name().map_or_else(|| "dataset".into(), |f| f.to_string_lossy().into_owned())
    });
    let readme = README_TEMPLATE
        .replace("{name}", &name)
        .replace("{source}", &source)
        .replace("{n}", &n.to_string())
        .replace("{m}", &m.to_string())
        .replace("{kind}", if opts.directed { "directed" } else { "undirected" });
    fs::write(out.join("README.md"), readme)?;
    Ok(out.clone())
}
