//! The `gli` command line: dataset validation, inspection, graph
//! properties, corpus indexing and edge list conversion.
//!
//! Exit codes: 0 on success, 1 when a dataset or index cannot be used,
//! 2 on usage errors (bad arguments, unknown fields, malformed filters).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::graph::{load_graph, GraphStorage};
use crate::index::{
    build_index, convert_edgelist, query_index, render_table, ConvertOptions, IndexDatabase, IndexError, TableFormat,
    FILTER_GRAMMAR,
};
use crate::metrics::{compute, dataset_graph, ApproxBudget, Group};
use crate::task::{load_task, resolve_split};
use crate::validate::validate_dataset;
use crate::view::task_files;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATASET: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gli", version, about = "Graph learning datasets: validate, inspect, measure and index")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricsFormat {
    Json,
    Md,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a dataset directory and list every problem found
    Validate {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
    },
    /// Summarize the graph and tasks of a dataset directory
    Inspect { dir: PathBuf },
    /// Compute graph properties of a dataset
    Metrics {
        dir: PathBuf,
        /// Comma-separated metric groups (default: all)
        #[arg(long, value_delimiter = ',')]
        groups: Vec<Group>,
        /// Largest node count for exact distance metrics
        #[arg(long)]
        budget_n: Option<usize>,
        /// Seed for sampled metrics
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: MetricsFormat,
        /// Report zero elapsed time so output is reproducible
        #[arg(long)]
        deterministic: bool,
    },
    /// Build or query a corpus index
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
    /// Convert raw data into a dataset directory
    Convert {
        #[command(subcommand)]
        command: ConvertCommand,
    },
}

#[derive(Debug, Subcommand)]
enum IndexCommand {
    /// Index every dataset directory under a root
    Build {
        root: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Leave out timings and timestamps
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        budget_n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Filter, sort and render the records of an index
    Query {
        file: PathBuf,
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        sort_by: Option<String>,
        #[arg(long)]
        desc: bool,
        /// markdown, json or csv
        #[arg(long, default_value = "markdown")]
        format: TableFormat,
        /// Comma-separated columns after the dataset id
        #[arg(long, value_delimiter = ',', default_value = "tasks")]
        fields: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
enum ConvertCommand {
    /// Convert a `src dst` edge list with optional node features and labels
    Edgelist {
        edges: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// CSV with one row of numbers per node
        #[arg(long)]
        features: Option<PathBuf>,
        /// CSV with one integer class per node
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long)]
        directed: bool,
        #[arg(long)]
        name: Option<String>,
    },
}

fn budget(budget_n: Option<usize>, seed: Option<u64>) -> ApproxBudget {
    let mut b = ApproxBudget::default();
    if let Some(n) = budget_n {
        b.exact_n = n;
    }
    if let Some(s) = seed {
        b.seed = s;
    }
    b
}

/// Outcome of a subcommand: an exit code plus optional error text.
type Outcome = Result<(), (i32, String)>;

fn dataset_err(e: impl std::fmt::Display) -> (i32, String) {
    (EXIT_DATASET, format!("error: {e}"))
}

fn index_err(e: IndexError, filter: Option<&str>) -> (i32, String) {
    if !e.is_usage() {
        return dataset_err(e);
    }
    let mut msg = format!("error: {e}\n");
    if let (IndexError::FilterParse { offset, .. }, Some(f)) = (&e, filter) {
        msg.push_str(&format!("  {f}\n  {}^\n", " ".repeat(f[..*offset].chars().count())));
    }
    msg.push_str("\nfilter grammar:\n");
    msg.push_str(FILTER_GRAMMAR);
    (EXIT_USAGE, msg)
}

fn inspect(dir: &Path, out: &mut dyn Write) -> std::io::Result<Result<(), String>> {
    let graph: GraphStorage = match load_graph(dir) {
        Ok(g) => g,
        Err(e) => return Ok(Err(e.to_string())),
    };
    writeln!(out, "dataset: {}", dir.display())?;
    if !graph.description.is_empty() {
        writeln!(out, "description: {}", graph.description)?;
    }
    writeln!(
        out,
        "{}, {}",
        if graph.directed { "directed" } else { "undirected" },
        if graph.heterogeneous { "heterogeneous" } else { "homogeneous" }
    )?;
    writeln!(out, "nodes: {}", graph.num_nodes())?;
    for g in &graph.node_groups {
        writeln!(out, "  {} [{}..{})", g.name, g.offset, g.offset + g.count)?;
        for (name, a) in &g.attributes {
            writeln!(out, "    {name}: {} {:?}", a.tensor.dtype().name(), a.tensor.shape())?;
        }
    }
    writeln!(out, "edges: {}", graph.num_edges())?;
    for g in &graph.edge_groups {
        writeln!(out, "  {}: {}", g.name, g.len())?;
        for (name, a) in &g.attributes {
            writeln!(out, "    {name}: {} {:?}", a.tensor.dtype().name(), a.tensor.shape())?;
        }
    }
    if let Some(set) = &graph.graphs {
        writeln!(out, "graphs: {}", set.count())?;
        for (name, a) in &set.attributes {
            writeln!(out, "    {name}: {} {:?}", a.tensor.dtype().name(), a.tensor.shape())?;
        }
    }
    let graph = Arc::new(graph);
    let files = task_files(dir)?;
    writeln!(out, "tasks: {}", files.len())?;
    for file in files {
        match load_task(dir, &file) {
            Err(e) => writeln!(out, "  {file}: unreadable ({e})")?,
            Ok(task) => {
                let sizes = resolve_split(&task, &graph, 0).map(|m| m.sizes());
                match sizes {
                    Ok([train, val, test]) => writeln!(
                        out,
                        "  {file}: {} ({} split(s); train {train}, val {val}, test {test})",
                        task.task_type,
                        task.num_splits()
                    )?,
                    Err(e) => writeln!(out, "  {file}: {} (invalid split: {e})", task.task_type)?,
                }
            }
        }
    }
    Ok(Ok(()))
}

fn execute(command: Command, out: &mut dyn Write) -> std::io::Result<Outcome> {
    match command {
        Command::Validate { dir, format } => {
            let report = match validate_dataset(&dir) {
                Ok(r) => r,
                Err(e) => return Ok(Err(dataset_err(format!("{}: {e}", dir.display())))),
            };
            match format {
                ReportFormat::Text => write!(out, "{}", report.to_text())?,
                ReportFormat::Json => writeln!(out, "{}", report.to_json())?,
            }
            Ok(if report.passed { Ok(()) } else { Err((EXIT_DATASET, String::new())) })
        }
        Command::Inspect { dir } => Ok(inspect(&dir, out)?.map_err(dataset_err)),
        Command::Metrics {
            dir,
            groups,
            budget_n,
            seed,
            format,
            deterministic,
        } => {
            let g = match dataset_graph(&dir) {
                Ok(g) => g,
                Err(e) => return Ok(Err(dataset_err(e))),
            };
            let groups = if groups.is_empty() { Group::ALL.to_vec() } else { groups };
            let mut report = compute(&g, &budget(budget_n, seed), &groups);
            if deterministic {
                report = report.without_timings();
            }
            match format {
                MetricsFormat::Json => writeln!(out, "{}", report.to_json())?,
                MetricsFormat::Md => write!(out, "{}", report.to_markdown())?,
            }
            Ok(Ok(()))
        }
        Command::Index {
            command: IndexCommand::Build {
                root,
                output,
                deterministic,
                budget_n,
                seed,
            },
        } => {
            let db = match build_index(&root, &budget(budget_n, seed), deterministic) {
                Ok(db) => db,
                Err(e) => return Ok(Err(dataset_err(format!("{}: {e}", root.display())))),
            };
            if let Err(e) = db.save(&output) {
                return Ok(Err(dataset_err(format!("{}: {e}", output.display()))));
            }
            let failed = db.records.iter().filter(|r| !r.passed).count();
            writeln!(
                out,
                "indexed {} dataset(s), {failed} failed validation: {}",
                db.records.len(),
                output.display()
            )?;
            Ok(Ok(()))
        }
        Command::Index {
            command:
                IndexCommand::Query {
                    file,
                    filter,
                    sort_by,
                    desc,
                    format,
                    fields,
                },
        } => {
            let db = match IndexDatabase::load(&file) {
                Ok(db) => db,
                Err(e) => return Ok(Err(dataset_err(format!("{}: {e}", file.display())))),
            };
            let fields: Vec<&str> = fields.iter().map(String::as_str).filter(|f| !f.is_empty()).collect();
            let table = query_index(&db, filter.as_deref(), sort_by.as_deref(), desc)
                .and_then(|records| render_table(&records, &fields, format));
            match table {
                Ok(text) => {
                    write!(out, "{text}")?;
                    Ok(Ok(()))
                }
                Err(e) => Ok(Err(index_err(e, filter.as_deref()))),
            }
        }
        Command::Convert {
            command:
                ConvertCommand::Edgelist {
                    edges,
                    output,
                    features,
                    labels,
                    directed,
                    name,
                },
        } => {
            let opts = ConvertOptions {
                edges,
                node_features: features,
                node_labels: labels,
                directed,
                name,
                out_dir: output,
            };
            match convert_edgelist(&opts) {
                Ok(dir) => {
                    writeln!(out, "wrote {}", dir.display())?;
                    Ok(Ok(()))
                }
                Err(e) => Ok(Err(dataset_err(e))),
            }
        }
    }
}

/// Runs the command line given by `args` (program name first), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out) {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err((code, message))) => {
            if !message.is_empty() {
                let _ = writeln!(err, "{}", message.trim_end());
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATASET
        }
    }
}
