use super::{pearson, Entry, LabeledGraph, Value};

pub(crate) fn basic_properties(g: &LabeledGraph) -> Vec<Entry> {
    let n = g.num_nodes() as f64;
    let m = g.num_edges() as f64;
    let directed = g.is_directed();
    let density = if g.num_nodes() < 2 {
        Entry::real("edge_density", f64::NAN).note("fewer than two nodes")
    } else if directed {
        Entry::real("edge_density", m / (n * (n - 1.0)))
    } else {
        Entry::real("edge_density", 2.0 * m / (n * (n - 1.0)))
    };
    let average_degree = if g.num_nodes() == 0 {
        Entry::real("average_degree", f64::NAN).note("empty graph")
    } else {
        Entry::real("average_degree", if directed { m / n } else { 2.0 * m / n })
    };
    let assortativity = match degree_assortativity(g) {
        Some(r) => Entry::real("degree_assortativity", r),
        None => Entry::real("degree_assortativity", f64::NAN).note("zero degree variance over linked pairs"),
    };
    vec![
        Entry::exact("is_directed", Value::Bool(directed)),
        Entry::exact("num_nodes", Value::Int(g.num_nodes() as i64)),
        Entry::exact("num_edges", Value::Int(g.num_edges() as i64)),
        density,
        average_degree,
        reciprocity(g),
        assortativity,
    ]
}

fn reciprocity(g: &LabeledGraph) -> Entry {
    if !g.is_directed() {
        return Entry::real("edge_reciprocity", 1.0).note("undirected: every edge points both ways");
    }
    let adj = g.out_adj();
    if adj.arcs() == 0 {
        return Entry::real("edge_reciprocity", f64::NAN).note("no edges");
    }
    let mutual = (0..g.num_nodes())
        .map(|u| adj.neighbors(u).iter().filter(|&&v| adj.contains(v, u)).count())
        .sum::<usize>();
    Entry::real("edge_reciprocity", mutual as f64 / adj.arcs() as f64)
}

/// Pearson correlation of endpoint degrees over linked pairs. Undirected
/// edges contribute both orientations; directed arcs pair the source's
/// out-degree with the target's in-degree. `None` when undefined.
pub fn degree_assortativity(g: &LabeledGraph) -> Option<f64> {
    let (out, inn) = (g.out_adj(), g.in_adj());
    let mut pairs = Vec::with_capacity(out.arcs());
    for u in 0..g.num_nodes() {
        for &v in out.neighbors(u) {
            pairs.push((out.degree(u) as f64, inn.degree(v) as f64));
        }
    }
    pearson(&pairs)
}
