mod common;

use common::{copy_fixture, fixtures_root, random_graph};
use gli_core::graph::{
    load_graph, parse_metadata, write_graph, AttrPath, Attribute, GraphError, GraphStorage,
};
use gli_core::tensor::{write_array, DenseArray};
use proptest::prelude::*;

#[test]
fn parses_fixture_metadata() {
    let text = std::fs::read_to_string(fixtures_root().join("triangle/metadata.json")).unwrap();
    let schema = parse_metadata(&text).unwrap();
    assert_eq!(schema.node_groups.len(), 1);
    assert_eq!(schema.edge_groups.len(), 1);
    assert!(!schema.is_directed);

    let text = std::fs::read_to_string(fixtures_root().join("hetero/metadata.json")).unwrap();
    let schema = parse_metadata(&text).unwrap();
    assert!(schema.is_heterogeneous);
    let mut names: Vec<_> = schema.node_groups.iter().map(|g| g.name.as_str()).collect();
    names.sort();
    assert_eq!(names, vec!["author", "paper"]);
    assert!(schema.edge_groups.iter().any(|g| g.name == "writes"));
}

#[test]
fn missing_edge_list_points_at_edge_key() {
    let err = parse_metadata(r#"{"description": "x", "data": {"Node": {}, "Edge": {}}}"#).unwrap_err();
    assert_eq!(err.code(), "SchemaError");
    assert!(err.pointer().unwrap().ends_with("/Edge/_Edge"));
}

#[test]
fn loads_triangle() {
    let g = load_graph(fixtures_root().join("triangle")).unwrap();
    assert_eq!((g.num_nodes(), g.num_edges(), g.directed), (3, 3, false));
    assert_eq!(g.num_graphs(), 1);
    assert_eq!(g.graph_node_sets(), vec![vec![0, 1, 2]]);
    let (label, n) = g.attribute(&AttrPath::parse("Node/NodeLabel").unwrap()).unwrap();
    assert_eq!(n, 3);
    assert_eq!(label.tensor.as_dense().unwrap().to_vec::<i64>().unwrap(), vec![0, 0, 1]);
}

#[test]
fn dangling_edge_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = copy_fixture("triangle", tmp.path());
    let edges = DenseArray::from_vec(vec![3, 2], vec![0i64, 1, 1, 7, 2, 0]).unwrap();
    write_array(&edges, dir.join("triangle.npz"), Some("edge")).unwrap();
    match load_graph(&dir).unwrap_err() {
        GraphError::DanglingEdge { id, bound, .. } => assert_eq!((id, bound), (7, 3)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn loads_multigraph_membership() {
    let g = load_graph(fixtures_root().join("multigraph")).unwrap();
    assert_eq!(g.num_graphs(), 2);
    assert_eq!(g.graph_node_sets(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    let edges = g.graphs.as_ref().unwrap().edges.as_ref().unwrap();
    assert_eq!(edges.sets(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
}

#[test]
fn loads_heterogeneous_groups() {
    let g = load_graph(fixtures_root().join("hetero")).unwrap();
    assert!(g.heterogeneous);
    assert_eq!(g.num_nodes(), 5);
    let paper = g.node_group("paper").unwrap();
    assert_eq!((paper.offset, paper.count), (0, 3));
    let writes = g.edge_group("writes").unwrap();
    assert_eq!(writes.src_group.as_deref(), Some("author"));
    assert_eq!(writes.dst_group.as_deref(), Some("paper"));
    assert!(g.attribute(&AttrPath::parse("Node/paper/PaperLabel").unwrap()).is_some());
    // a group-less path is ambiguous with two node groups
    assert!(g.attribute(&AttrPath::parse("Node/PaperLabel").unwrap()).is_none());
}

#[test]
fn fixtures_round_trip() {
    for name in ["triangle", "square", "multigraph", "temporal", "kg", "hetero"] {
        let g = load_graph(fixtures_root().join(name)).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        write_graph(&g, tmp.path()).unwrap();
        assert_eq!(load_graph(tmp.path()).unwrap(), g, "{name}");
    }
}

#[test]
fn wrong_attribute_length_writes_nothing() {
    let mut g: GraphStorage = load_graph(fixtures_root().join("triangle")).unwrap();
    g.node_groups[0]
        .attributes
        .insert("Broken".into(), Attribute::dense(DenseArray::vector(vec![1.0f64, 2.0])));
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    match write_graph(&g, &out).unwrap_err() {
        GraphError::ShapeMismatch { expected, actual, .. } => assert_eq!((expected, actual), (3, 2)),
        other => panic!("{other:?}"),
    }
    assert!(!out.exists());
}

#[test]
fn missing_metadata() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(load_graph(tmp.path()).unwrap_err().code(), "MissingMetadata");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn write_then_load_is_identity(seed in any::<u64>()) {
        let g = random_graph(seed);
        let tmp = tempfile::tempdir().unwrap();
        write_graph(&g, tmp.path()).unwrap();
        prop_assert_eq!(load_graph(tmp.path()).unwrap(), g);
    }

    #[test]
    fn merging_groups_preserves_totals(seed in any::<u64>()) {
        let g = random_graph(seed);
        let n: usize = g.node_groups.iter().map(|x| x.count).sum();
        let m: usize = g.edge_groups.iter().map(|x| x.len()).sum();
        let merged = g.homogeneous_edges();
        prop_assert_eq!(merged.len(), m);
        prop_assert!(merged.iter().all(|&(s, d)| s < n && d < n));
        prop_assert_eq!(g.num_nodes(), n);
    }
}
