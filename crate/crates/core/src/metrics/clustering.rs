use super::{Adjacency, Entry, LabeledGraph, Value};

/// Triangles through each node of the undirected simple graph.
pub(crate) fn triangles(adj: &Adjacency, n: usize) -> Vec<u64> {
    let mut mark = vec![false; n];
    let mut out = vec![0u64; n];
    for u in 0..n {
        for &v in adj.neighbors(u) {
            mark[v] = true;
        }
        let mut twice = 0u64;
        for &v in adj.neighbors(u) {
            twice += adj.neighbors(v).iter().filter(|&&w| mark[w]).count() as u64;
        }
        out[u] = twice / 2;
        for &v in adj.neighbors(u) {
            mark[v] = false;
        }
    }
    out
}

/// Local clustering of a directed graph: the diagonal of `(A + Aᵀ)³` over
/// `2 (d_tot (d_tot - 1) - 2 d_recip)`, zero where the denominator vanishes.
fn directed_clustering(g: &LabeledGraph) -> Vec<f64> {
    let n = g.num_nodes();
    let (out, inn, und) = (g.out_adj(), g.in_adj(), g.und_adj());
    let mut weight = vec![0u64; n];
    let mut result = vec![0.0; n];
    for i in 0..n {
        for &k in out.neighbors(i).iter().chain(inn.neighbors(i)) {
            weight[k] += 1;
        }
        let mut closed = 0u64;
        for &j in und.neighbors(i) {
            let through_j: u64 = out.neighbors(j).iter().chain(inn.neighbors(j)).map(|&k| weight[k]).sum();
            closed += weight[j] * through_j;
        }
        let total = (out.degree(i) + inn.degree(i)) as u64;
        let reciprocal = out.neighbors(i).iter().filter(|&&k| weight[k] == 2).count() as u64;
        let denom = 2 * (total * total.saturating_sub(1)).saturating_sub(2 * reciprocal);
        result[i] = if denom == 0 { 0.0 } else { closed as f64 / denom as f64 };
        for &k in out.neighbors(i).iter().chain(inn.neighbors(i)) {
            weight[k] = 0;
        }
    }
    result
}

/// Coreness of every node of the undirected simple graph, by bucket-based
/// peeling in order of current degree.
pub fn coreness(g: &LabeledGraph) -> Vec<usize> {
    let n = g.num_nodes();
    let adj = g.und_adj();
    let mut degree: Vec<usize> = (0..n).map(|u| adj.degree(u)).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    // nodes sorted by degree, with the start of each degree's bucket
    let mut bin = vec![0usize; max_degree + 2];
    for &d in &degree {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    let mut next = bin.clone();
    for u in 0..n {
        pos[u] = next[degree[u]];
        order[pos[u]] = u;
        next[degree[u]] += 1;
    }
    for i in 0..n {
        let u = order[i];
        for &v in adj.neighbors(u) {
            if degree[v] > degree[u] {
                // move v to the front of its bucket, then shrink its degree
                let dv = degree[v];
                let front = bin[dv];
                let w = order[front];
                if w != v {
                    order.swap(pos[v], front);
                    pos[w] = pos[v];
                    pos[v] = front;
                }
                bin[dv] += 1;
                degree[v] -= 1;
            }
        }
    }
    degree
}

pub(crate) fn clustering_properties(g: &LabeledGraph) -> Vec<Entry> {
    let n = g.num_nodes();
    let und = g.und_adj();
    let tri = triangles(und, n);
    let average = if n == 0 {
        Entry::real("average_clustering_coefficient", f64::NAN).note("empty graph")
    } else {
        let local: Vec<f64> = if g.is_directed() {
            directed_clustering(g)
        } else {
            (0..n)
                .map(|u| {
                    let d = und.degree(u) as f64;
                    if d < 2.0 {
                        0.0
                    } else {
                        2.0 * tri[u] as f64 / (d * (d - 1.0))
                    }
                })
                .collect()
        };
        Entry::real("average_clustering_coefficient", local.iter().sum::<f64>() / n as f64)
    };
    let closed: u64 = tri.iter().sum();
    let triads: u64 = (0..n).map(|u| (und.degree(u) * und.degree(u).saturating_sub(1) / 2) as u64).sum();
    let transitivity = if triads == 0 {
        Entry::real("transitivity", 0.0).note("no triads")
    } else {
        Entry::real("transitivity", closed as f64 / triads as f64)
    }
    .note_if(g.is_directed(), "direction ignored");
    let degeneracy = coreness(g).into_iter().max().unwrap_or(0);
    vec![
        average,
        transitivity,
        Entry::exact("degeneracy", Value::Int(degeneracy as i64)).note_if(g.is_directed(), "direction ignored"),
    ]
}
