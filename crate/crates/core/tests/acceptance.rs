//! Acceptance suite. Runs every criterion in turn, prints one PASS/FAIL
//! line per criterion and exits non-zero when any fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::oracle::{self, close, erdos_renyi, Dense};
use common::{codes_after, copy_fixture, edit_json, fixtures_root, random_graph, replace_member};
use gli_core::cli::run;
use gli_core::graph::{load_graph, write_graph};
use gli_core::index::{convert_edgelist, query_index, render_table, ConvertOptions, IndexDatabase, TableFormat};
use gli_core::metrics::{coreness, compute_all, dataset_graph, gini, ApproxBudget, LabeledGraph, Mode, Value};
use gli_core::task::{load_task, TaskType};
use gli_core::tensor::{write_array, DenseArray};
use gli_core::validate::{validate_dataset, Code};
use gli_core::view::{combine_graph_and_task, task_files};
use rand::Rng;
use tempfile::TempDir;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const FIXTURES: [&str; 6] = ["triangle", "square", "multigraph", "temporal", "kg", "hetero"];

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn format_round_trip() -> Outcome {
    let start = Instant::now();
    let mut heterogeneous = 0;
    for seed in 0..100u64 {
        let g = random_graph(seed);
        heterogeneous += usize::from(g.heterogeneous);
        let tmp = TempDir::new().map_err(|e| e.to_string())?;
        write_graph(&g, tmp.path()).map_err(|e| format!("seed {seed}: write failed: {e}"))?;
        let back = load_graph(tmp.path()).map_err(|e| format!("seed {seed}: load failed: {e}"))?;
        ensure!(back == g, "seed {seed}: loaded graph differs from the written one");
        ensure!(g.num_nodes() <= 50, "seed {seed}: generator exceeded 50 nodes");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {}", secs(elapsed));
    Ok(format!("100 graphs ({heterogeneous} heterogeneous) in {}", secs(elapsed)))
}

fn validator_mutations() -> Outcome {
    let write = |d: &Path, file: &str, key: &str, a: DenseArray| write_array(&a, d.join(file), Some(key)).unwrap();
    type Mutation = Box<dyn Fn(&Path)>;
    let cases: Vec<(&str, Code, Mutation)> = vec![
        (
            "bad magic",
            Code::BadMagic,
            Box::new(|d: &Path| {
                replace_member(&d.join("triangle.npz"), "node_feats", |mut raw| {
                    raw[1] = b'X';
                    raw
                })
            }),
        ),
        (
            "dangling edge",
            Code::DanglingEdge,
            Box::new(move |d: &Path| {
                write(d, "triangle.npz", "edge", DenseArray::from_vec(vec![3, 2], vec![0i64, 1, 1, 7, 2, 0]).unwrap())
            }),
        ),
        (
            "shape mismatch",
            Code::ShapeMismatch,
            Box::new(move |d: &Path| {
                write(d, "triangle.npz", "node_feats", DenseArray::from_vec(vec![2, 2], vec![0.5f32, 1.0, 1.5, 2.0]).unwrap())
            }),
        ),
        (
            "label out of range",
            Code::LabelOutOfRange,
            Box::new(move |d: &Path| write(d, "triangle.npz", "node_class", DenseArray::vector(vec![0i64, 5, 1]))),
        ),
        (
            "split overlap",
            Code::SplitOverlap,
            Box::new(move |d: &Path| write(d, "triangle_task.npz", "test", DenseArray::vector(vec![0i64]))),
        ),
        (
            "missing num_classes",
            Code::MissingNumClasses,
            Box::new(|d: &Path| {
                edit_json(&d.join("task_node_classification.json"), |v| {
                    v.as_object_mut().unwrap().remove("num_classes");
                })
            }),
        ),
        (
            "unhosted data file",
            Code::UnhostedData,
            Box::new(|d: &Path| {
                edit_json(&d.join("urls.json"), |v| {
                    v.as_object_mut().unwrap().remove("triangle_task.npz");
                })
            }),
        ),
        (
            "missing metadata",
            Code::MissingMetadata,
            Box::new(|d: &Path| fs::remove_file(d.join("metadata.json")).unwrap()),
        ),
        (
            "truncated payload",
            Code::TruncatedPayload,
            Box::new(|d: &Path| replace_member(&d.join("triangle.npz"), "node_feats", |raw| raw[..raw.len() - 4].to_vec())),
        ),
        (
            "split index out of range",
            Code::SplitOutOfRange,
            Box::new(move |d: &Path| write(d, "triangle_task.npz", "test", DenseArray::vector(vec![2i64, 3]))),
        ),
        (
            "missing data file",
            Code::MissingDataFile,
            Box::new(|d: &Path| fs::remove_file(d.join("triangle.npz")).unwrap()),
        ),
        (
            "unknown task type",
            Code::UnknownTaskType,
            Box::new(|d: &Path| {
                edit_json(&d.join("task_node_classification.json"), |v| v["type"] = "NodeRanking".into())
            }),
        ),
    ];
    let clean = validate_dataset(fixtures_root().join("triangle")).map_err(|e| e.to_string())?;
    ensure!(clean.findings.is_empty(), "the clean fixture is not clean:\n{}", clean.to_text());
    let total = cases.len();
    for (name, code, mutate) in cases {
        let codes = codes_after(|d| mutate(d));
        ensure!(codes == vec![code], "{name}: expected [{}], got {codes:?}", code.as_str());
    }
    Ok(format!("{total}/{total} defect classes detected with exactly the expected code"))
}

fn metric_oracle() -> Outcome {
    let mut rng = oracle::rng(2024);
    let budget = ApproxBudget::default();
    let (mut implementation, mut reference) = (Duration::ZERO, Duration::ZERO);
    let (mut compared, mut exact_connectivity) = (0, 0);
    for case in 0..50 {
        let n = rng.random_range(5..=200);
        let p = [0.05, 0.2, 0.5][case % 3];
        let directed = rng.random_bool(0.5);
        let edges = erdos_renyi(&mut rng, n, p, directed);
        let labels: Vec<i64> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let features: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let g = LabeledGraph::new(n, directed, &edges)
            .with_labels(labels.iter().map(|&y| Some(y)).collect())
            .with_features(features.clone());

        let t = Instant::now();
        let report = compute_all(&g, &budget);
        implementation += t.elapsed();

        let t = Instant::now();
        let dense = Dense::new(n, directed, &edges);
        let mut expected = oracle::metrics(&dense, Some(&labels), Some(&features));
        if report.get("average_node_connectivity").unwrap().mode == Mode::Exact {
            expected.insert("average_node_connectivity", oracle::average_node_connectivity(&dense));
            exact_connectivity += 1;
        }
        reference += t.elapsed();

        for (name, want) in &expected {
            let got = report.get(name).ok_or_else(|| format!("case {case}: {name} missing"))?;
            if got.mode != Mode::Exact {
                continue;
            }
            ensure!(
                close(got.value.as_f64(), *want, 1e-9),
                "case {case} (n={n}, p={p}, directed={directed}) {name}: {} vs oracle {want}",
                got.value
            );
            compared += 1;
        }
        let pseudo = report.value("pseudo_diameter");
        ensure!(pseudo <= expected["diameter"], "case {case}: pseudo-diameter {pseudo} above diameter {}", expected["diameter"]);
    }
    ensure!(implementation < Duration::from_secs(60), "implementation took {}", secs(implementation));
    Ok(format!(
        "{compared} exact values matched on 50 graphs ({exact_connectivity} with exact connectivity); implementation {}, oracle {}",
        secs(implementation),
        secs(reference)
    ))
}

fn hand_values() -> Outcome {
    let budget = ApproxBudget::default();
    let triangle = compute_all(&LabeledGraph::new(3, false, &[(0, 1), (1, 2), (2, 0)]), &budget);
    for (name, want) in [("edge_density", 1.0), ("transitivity", 1.0), ("global_efficiency", 1.0)] {
        ensure!(triangle.value(name) == want, "triangle {name} = {}", triangle.value(name));
    }
    let degeneracy = triangle.get("degeneracy").unwrap().value;
    ensure!(degeneracy == Value::Int(2), "triangle degeneracy = {degeneracy}");

    let pendant = compute_all(&LabeledGraph::new(4, false, &[(0, 1), (1, 2), (2, 0), (2, 3)]), &budget);
    ensure!(close(pendant.value("transitivity"), 0.6, 1e-12), "pendant transitivity = {}", pendant.value("transitivity"));

    let cycle = LabeledGraph::new(4, false, &[(0, 1), (1, 2), (2, 3), (3, 0)])
        .with_labels(vec![Some(0), Some(0), Some(1), Some(1)]);
    let h = compute_all(&cycle, &budget).value("homophily_measure");
    ensure!(h == 0.0, "4-cycle homophily = {h}");

    // a path 0-1-2-3 has degrees [1, 2, 2, 1]
    let path = LabeledGraph::new(4, false, &[(0, 1), (1, 2), (2, 3)]);
    let alpha = compute_all(&path, &budget).value("power_law_exponent");
    let closed_form = 1.0 + 4.0 / (6.0 * 2f64.ln());
    ensure!((alpha - closed_form).abs() < 1e-6, "power-law exponent {alpha} vs {closed_form}");
    ensure!((alpha - 1.9618).abs() < 5e-5, "power-law exponent {alpha} does not round to 1.9618");
    ensure!(coreness(&path) == vec![1, 1, 1, 1], "path coreness {:?}", coreness(&path));

    let g = gini(&[0.0, 1.0]);
    ensure!(g == 0.5, "gini([0, 1]) = {g}");
    Ok(format!("density/transitivity/efficiency 1, degeneracy 2, 0.6, h=0, alpha={alpha:.7}, gini 0.5"))
}

fn scale_check() -> Outcome {
    let mut rng = oracle::rng(99);
    let (n, m) = (10_000usize, 50_000usize);
    let mut seen = BTreeSet::new();
    while seen.len() < m {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            seen.insert((u.min(v), u.max(v)));
        }
    }
    let edges: Vec<(usize, usize)> = seen.into_iter().collect();
    let g = LabeledGraph::new(n, false, &edges);
    let start = Instant::now();
    let report = compute_all(&g, &ApproxBudget::default());
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "compute_all took {}", secs(elapsed));
    for name in ["diameter", "average_shortest_path_length", "global_efficiency", "average_node_connectivity"] {
        let mode = report.get(name).unwrap().mode;
        ensure!(mode == Mode::Approximate, "{name} is {}", mode.as_str());
    }
    ensure!(report.value("num_edges") == m as f64, "num_edges = {}", report.value("num_edges"));
    Ok(format!("10000 nodes, 50000 edges in {}", secs(elapsed)))
}

fn cli(args: &[&str]) -> (i32, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["gli"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, format!("{}{}", String::from_utf8_lossy(&out), String::from_utf8_lossy(&err)))
}

fn end_to_end() -> Outcome {
    let work = TempDir::new().map_err(|e| e.to_string())?;
    let root = work.path().join("corpus");
    fs::create_dir(&root).map_err(|e| e.to_string())?;
    let edges = work.path().join("edges.tsv");
    fs::write(&edges, "src\tdst\n0\t1\n1\t2\n2\t0\n").map_err(|e| e.to_string())?;
    let labels = work.path().join("labels.csv");
    fs::write(&labels, "0\n1\n1\n").map_err(|e| e.to_string())?;
    let converted = convert_edgelist(&ConvertOptions {
        edges: edges.clone(),
        node_labels: Some(labels),
        out_dir: root.join("converted"),
        ..ConvertOptions::default()
    })
    .map_err(|e| format!("convert: {e}"))?;

    let report = validate_dataset(&converted).map_err(|e| e.to_string())?;
    ensure!(report.errors().count() == 0, "converted dataset has errors:\n{}", report.to_text());
    let metrics = compute_all(&dataset_graph(&converted).map_err(|e| e.to_string())?, &ApproxBudget::default());
    ensure!(metrics.value("num_nodes") == 3.0 && metrics.value("num_edges") == 3.0, "converted graph is not 3 nodes, 3 edges");
    let (code, text) = cli(&["metrics", converted.to_str().unwrap(), "--format", "json"]);
    ensure!(code == 0, "metrics exited {code}: {text}");

    for name in ["kg", "temporal"] {
        copy_fixture(name, &root);
    }
    let mut builds = Vec::new();
    for i in 0..2 {
        let out = work.path().join(format!("index{i}.json"));
        let (code, text) = cli(&["index", "build", root.to_str().unwrap(), "-o", out.to_str().unwrap(), "--deterministic"]);
        ensure!(code == 0, "index build exited {code}: {text}");
        builds.push(fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure!(builds[0] == builds[1], "deterministic builds differ");

    // expected order from the stored edge lists: M/N directed, 2M/N undirected
    let mut expected: Vec<(String, f64)> = ["converted", "kg", "temporal"]
        .iter()
        .map(|id| {
            let g = load_graph(root.join(id)).unwrap();
            let m = g.num_edges() as f64 * if g.directed { 1.0 } else { 2.0 };
            (id.to_string(), m / g.num_nodes() as f64)
        })
        .collect();
    expected.sort_by(|a, b| b.1.total_cmp(&a.1));
    let expected: Vec<String> = expected.into_iter().map(|e| e.0).collect();

    let db = IndexDatabase::load(work.path().join("index0.json")).map_err(|e| e.to_string())?;
    let got: Vec<String> = query_index(&db, None, Some("average_degree"), true)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|r| r.id.clone())
        .collect();
    ensure!(got == expected, "query order {got:?}, expected {expected:?}");
    let (code, text) = cli(&[
        "index",
        "query",
        work.path().join("index0.json").to_str().unwrap(),
        "--sort-by",
        "average_degree",
        "--desc",
        "--format",
        "csv",
        "--fields",
        "average_degree",
    ]);
    ensure!(code == 0, "index query exited {code}: {text}");
    let cli_order: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    ensure!(cli_order == expected, "CLI order {cli_order:?}");
    Ok(format!("order {}; deterministic rebuild byte-identical", expected.join(" > ")))
}

fn task_types_and_grid() -> Outcome {
    let mut seen = BTreeSet::new();
    for name in FIXTURES {
        let dir = fixtures_root().join(name);
        let graph = Arc::new(load_graph(&dir).map_err(|e| format!("{name}: {e}"))?);
        for file in task_files(&dir).map_err(|e| e.to_string())? {
            let task = load_task(&dir, &file).map_err(|e| format!("{name}/{file}: {e}"))?;
            let t = task.task_type;
            let view = combine_graph_and_task(graph.clone(), task).map_err(|e| format!("{name}/{file}: {e}"))?;
            ensure!(view.masks().sizes()[0] > 0, "{name}/{file}: empty training split");
            seen.insert(t);
        }
    }
    let all: BTreeSet<TaskType> = TaskType::ALL.into_iter().collect();
    ensure!(seen == all, "task types covered: {seen:?}");

    let db = gli_core::index::build_index(fixtures_root(), &ApproxBudget::default(), true).map_err(|e| e.to_string())?;
    let records: Vec<_> = db.records.iter().filter(|r| r.id == "kg" || r.id == "triangle").collect();
    let table = render_table(&records, &["tasks"], TableFormat::Markdown).map_err(|e| e.to_string())?;
    let header: Vec<&str> = table.lines().next().unwrap().trim_matches('|').split('|').map(str::trim).collect();
    let listed = [
        "NodeClassification",
        "NodeRegression",
        "GraphClassification",
        "GraphRegression",
        "LinkPrediction",
        "TimeDependentLinkPrediction",
        "KGEntityPrediction",
        "KGRelationPrediction",
    ];
    ensure!(header[1..] == listed, "grid columns {:?}", &header[1..]);
    for (line, r) in table.lines().skip(2).zip(&records) {
        let cells: Vec<&str> = line.trim_matches('|').split('|').map(str::trim).collect();
        for (cell, t) in cells[1..].iter().zip(TaskType::ALL) {
            ensure!((*cell == "✓") == r.has_task(t), "{} {t}: cell {cell:?}", r.id);
        }
    }
    Ok("8 task types resolve on fixtures; grid has 8 task columns in canonical order".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("format round trip", format_round_trip),
        ("validator mutation suite", validator_mutations),
        ("metric oracle equivalence", metric_oracle),
        ("hand-verified values", hand_values),
        ("scale check", scale_check),
        ("end to end", end_to_end),
        ("task types and grid", task_types_and_grid),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
