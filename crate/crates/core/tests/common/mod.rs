#![allow(dead_code)]

pub mod oracle;

use std::fs;
use std::path::{Path, PathBuf};

use gli_core::graph::{Attribute, Attributes, EdgeGroup, GraphSet, GraphStorage, Membership, NodeGroup};
use gli_core::tensor::{DType, DenseArray, SparseMatrix, Tensor};
use gli_core::tensor::{NpzReader, NpzWriter};
use gli_core::validate::{validate_dataset, Code};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde_json::Value;

pub fn fixtures_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Copies a fixture dataset into `dest/<name>` and returns the new path.
pub fn copy_fixture(name: &str, dest: &Path) -> PathBuf {
    let src = fixtures_root().join(name);
    let out = dest.join(name);
    std::fs::create_dir_all(&out).unwrap();
    for entry in std::fs::read_dir(src).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), out.join(entry.file_name())).unwrap();
    }
    out
}

fn random_dense(rng: &mut SplitMix64, shape: Vec<usize>) -> DenseArray {
    let dtype = DType::ALL[rng.random_range(0..DType::ALL.len())];
    let n: usize = shape.iter().product::<usize>() * dtype.size();
    let mut bytes: Vec<u8> = (0..n).map(|_| rng.random()).collect();
    if dtype == DType::Bool {
        bytes.iter_mut().for_each(|b| *b &= 1);
    }
    DenseArray::from_raw(dtype, shape, bytes).unwrap()
}

fn random_csr(rng: &mut SplitMix64, rows: usize, cols: usize) -> SparseMatrix {
    let mut indptr = vec![0i64];
    let mut indices = Vec::new();
    for _ in 0..rows {
        for c in 0..cols {
            if rng.random_bool(0.3) {
                indices.push(c as i32);
            }
        }
        indptr.push(indices.len() as i64);
    }
    let values: Vec<f32> = (0..indices.len()).map(|_| rng.random_range(-4.0..4.0)).collect();
    SparseMatrix::csr(
        [rows, cols],
        DenseArray::vector(indptr),
        DenseArray::vector(indices),
        DenseArray::vector(values),
    )
    .unwrap()
}

fn random_attributes(rng: &mut SplitMix64, count: usize) -> Attributes {
    let mut out = Attributes::new();
    for k in 0..rng.random_range(0..=3) {
        let width = rng.random_range(0..4);
        let tensor = if rng.random_bool(0.2) {
            Tensor::Sparse(random_csr(rng, count, width + 1))
        } else if rng.random_bool(0.5) {
            Tensor::Dense(random_dense(rng, vec![count]))
        } else {
            Tensor::Dense(random_dense(rng, vec![count, width]))
        };
        let declared_type = match rng.random_range(0..3) {
            0 => None,
            1 => Some(tensor.dtype().name().to_string()),
            _ => Some(
                if tensor.dtype() == DType::Bool {
                    "bool"
                } else if tensor.dtype().is_float() {
                    "float"
                } else {
                    "int"
                }
                .to_string(),
            ),
        };
        out.insert(
            format!("Attr{k}"),
            Attribute {
                description: format!("attribute {k}"),
                declared_type,
                tensor,
            },
        );
    }
    out
}

fn random_membership(rng: &mut SplitMix64, graphs: usize, n: usize) -> Membership {
    match rng.random_range(0..3) {
        0 => Membership(Tensor::Dense(DenseArray::vector(
            (0..n).map(|_| rng.random_range(0..graphs as i64)).collect::<Vec<i64>>(),
        ))),
        1 => Membership(Tensor::Dense(
            DenseArray::from_vec(vec![graphs, n], (0..graphs * n).map(|_| rng.random_bool(0.5)).collect()).unwrap(),
        )),
        _ => {
            let mut m = random_csr(rng, graphs, n);
            // membership values are indicator ones
            let ones = DenseArray::vector(vec![1u8; m.nnz()]);
            m = SparseMatrix::new(m.shape(), m.layout().clone(), ones).unwrap();
            Membership(Tensor::Sparse(m))
        }
    }
}

/// The node group holding all `ids`, mirroring how endpoint groups are
/// derived on load.
fn owner(groups: &[NodeGroup], ids: impl Iterator<Item = usize>) -> Option<String> {
    let mut found: Option<&NodeGroup> = None;
    for id in ids {
        let g = groups.iter().find(|g| (g.offset..g.offset + g.count).contains(&id))?;
        match found {
            Some(f) if f.name != g.name => return None,
            _ => found = Some(g),
        }
    }
    found.map(|g| g.name.clone())
}

/// A random valid graph with at most 50 nodes; about half are heterogeneous.
pub fn random_graph(seed: u64) -> GraphStorage {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let heterogeneous = rng.random_bool(0.5);
    let node_counts: Vec<usize> = if heterogeneous {
        let groups = rng.random_range(1..=3);
        (0..groups).map(|_| rng.random_range(0..=16)).collect()
    } else {
        vec![rng.random_range(0..=50)]
    };
    let mut offset = 0;
    let mut node_groups = Vec::new();
    for (i, &count) in node_counts.iter().enumerate() {
        node_groups.push(NodeGroup {
            name: if heterogeneous { format!("kind{i}") } else { "Node".into() },
            offset: if count == 0 { 0 } else { offset },
            count,
            attributes: random_attributes(&mut rng, count),
        });
        offset += count;
    }
    let n = offset;
    let edge_group_count = if heterogeneous { rng.random_range(1..=3) } else { 1 };
    let mut edge_groups = Vec::new();
    for i in 0..edge_group_count {
        let m = if n == 0 { 0 } else { rng.random_range(0..=40) };
        let ids: Vec<i64> = (0..2 * m).map(|_| rng.random_range(0..n as i64)).collect();
        let edges = if rng.random_bool(0.5) {
            DenseArray::from_vec(vec![m, 2], ids).unwrap()
        } else {
            DenseArray::from_vec(vec![m, 2], ids.into_iter().map(|v| v as i32).collect()).unwrap()
        };
        let pairs: Vec<(usize, usize)> = edges
            .to_i64_vec()
            .unwrap()
            .chunks(2)
            .map(|p| (p[0] as usize, p[1] as usize))
            .collect();
        edge_groups.push(EdgeGroup {
            name: if heterogeneous { format!("rel{i}") } else { "Edge".into() },
            src_group: owner(&node_groups, pairs.iter().map(|p| p.0)),
            dst_group: owner(&node_groups, pairs.iter().map(|p| p.1)),
            edges,
            attributes: Attributes::new(),
        });
    }
    for g in &mut edge_groups {
        g.attributes = random_attributes(&mut rng, g.len());
    }
    let mut graph = GraphStorage {
        description: format!("random graph {seed}"),
        citation: rng.random_bool(0.5).then(|| format!("@misc{{g{seed}}}")),
        directed: rng.random_bool(0.5),
        heterogeneous,
        node_groups,
        edge_groups,
        graphs: None,
    };
    if rng.random_bool(0.3) {
        let g = rng.random_range(1..=3);
        let nodes = random_membership(&mut rng, g, n);
        let edges = rng.random_bool(0.5).then(|| random_membership(&mut rng, g, graph.num_edges()));
        let count = nodes.graph_count();
        graph.graphs = Some(GraphSet {
            nodes,
            edges,
            attributes: random_attributes(&mut rng, count),
        });
    }
    graph
}

/// Rewrites one member of an archive with arbitrary bytes, keeping the rest.
pub fn replace_member(archive: &Path, key: &str, edit: impl Fn(Vec<u8>) -> Vec<u8>) {
    let mut reader = NpzReader::open(archive).unwrap();
    let members: Vec<(String, Vec<u8>)> = reader
        .keys()
        .into_iter()
        .map(|k| {
            let raw = reader.read_raw(&k).unwrap();
            let raw = if k == key { edit(raw) } else { raw };
            (k, raw)
        })
        .collect();
    drop(reader);
    let mut writer = NpzWriter::create(archive).unwrap();
    for (k, raw) in members {
        writer.add_raw(&k, &raw).unwrap();
    }
    writer.finish().unwrap();
}

pub fn edit_json(path: &Path, edit: impl FnOnce(&mut Value)) {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    edit(&mut v);
    fs::write(path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
}

/// Error codes of a copy of the triangle fixture after `mutate`, deduplicated.
pub fn codes_after(mutate: impl FnOnce(&Path)) -> Vec<Code> {
    let tmp = tempfile::tempdir().unwrap();
    let dir = copy_fixture("triangle", tmp.path());
    mutate(&dir);
    let mut codes = validate_dataset(&dir).unwrap().error_codes();
    codes.dedup();
    codes
}
