use rand::seq::index::sample;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use super::{Adjacency, ApproxBudget, Entry, LabeledGraph, Mode, Value};

const UNSEEN: u32 = u32::MAX;

/// Breadth-first distances from `source`. `dist` must hold `UNSEEN` for
/// every node on entry and is restored before returning; `order` receives
/// the reached nodes paired with their distance.
pub(crate) fn bfs(adj: &Adjacency, source: usize, dist: &mut [u32], order: &mut Vec<(usize, u32)>) {
    order.clear();
    dist[source] = 0;
    order.push((source, 0));
    let mut head = 0;
    while head < order.len() {
        let (u, d) = order[head];
        head += 1;
        for &v in adj.neighbors(u) {
            if dist[v] == UNSEEN {
                dist[v] = d + 1;
                order.push((v, d + 1));
            }
        }
    }
    for &(u, _) in order.iter() {
        dist[u] = UNSEEN;
    }
}

/// Weakly connected components; returns each node's component id and the
/// members of the largest one (ties go to the component holding the
/// smallest node id).
pub(crate) fn largest_component(g: &LabeledGraph) -> (Vec<usize>, Vec<usize>) {
    let n = g.num_nodes();
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        comp[s] = id;
        stack.push(s);
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in g.und_adj().neighbors(u) {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    let best = sizes
        .iter()
        .enumerate()
        .max_by_key(|&(i, &s)| (s, std::cmp::Reverse(i)))
        .map(|(i, _)| i);
    let members = match best {
        Some(b) => (0..n).filter(|&u| comp[u] == b).collect(),
        None => Vec::new(),
    };
    (comp, members)
}

/// Double-sweep lower bound on the diameter of the largest component:
/// repeatedly run BFS from the farthest node found so far while the
/// eccentricity keeps growing. `None` for an empty graph.
pub fn pseudo_diameter(g: &LabeledGraph) -> Option<u32> {
    let (_, lcc) = largest_component(g);
    let mut current = *lcc.first()?;
    let mut dist = vec![UNSEEN; g.num_nodes()];
    let mut order = Vec::new();
    let mut best = 0;
    loop {
        bfs(g.out_adj(), current, &mut dist, &mut order);
        let ecc = order.last().map_or(0, |p| p.1);
        // farthest node, smallest id among ties
        let far = order.iter().filter(|p| p.1 == ecc).map(|p| p.0).min().unwrap_or(current);
        if ecc <= best && best > 0 {
            return Some(best);
        }
        if ecc == 0 {
            return Some(best);
        }
        best = ecc;
        current = far;
    }
}

#[derive(Default, Clone, Copy)]
struct SourceStats {
    efficiency: f64,
    eccentricity: u32,
    distance_sum: u64,
    pairs: u64,
}

fn from_sources(g: &LabeledGraph, sources: &[usize]) -> Vec<SourceStats> {
    let n = g.num_nodes();
    sources
        .par_iter()
        .map_init(
            || (vec![UNSEEN; n], Vec::new()),
            |(dist, order), &s| {
                bfs(g.out_adj(), s, dist, order);
                let mut st = SourceStats::default();
                for &(_, d) in &order[1..] {
                    st.efficiency += 1.0 / d as f64;
                    st.distance_sum += u64::from(d);
                    st.pairs += 1;
                    st.eccentricity = st.eccentricity.max(d);
                }
                st
            },
        )
        .collect()
}

fn sample_from(items: &[usize], k: usize, rng: &mut SplitMix64) -> Vec<usize> {
    if k >= items.len() {
        return items.to_vec();
    }
    let mut picked: Vec<usize> = sample(rng, items.len(), k).into_iter().map(|i| items[i]).collect();
    picked.sort_unstable();
    picked
}

pub(crate) fn distance_properties(g: &LabeledGraph, budget: &ApproxBudget) -> Vec<Entry> {
    let n = g.num_nodes();
    if n == 0 {
        return ["diameter", "pseudo_diameter", "average_shortest_path_length", "global_efficiency"]
            .into_iter()
            .map(|name| Entry::real(name, f64::NAN).note("empty graph"))
            .collect();
    }
    let (comp, lcc) = largest_component(g);
    let lcc_id = comp[lcc[0]];
    let pseudo = pseudo_diameter(g).unwrap_or(0);
    let lcc_only = lcc.len() < n;

    let exact = n <= budget.exact_n;
    let (eff_stats, lcc_stats): (Vec<SourceStats>, Vec<SourceStats>) = if exact {
        let all: Vec<usize> = (0..n).collect();
        let stats = from_sources(g, &all);
        let lcc_stats = all.iter().filter(|&&u| comp[u] == lcc_id).map(|&u| stats[u]).collect();
        (stats, lcc_stats)
    } else {
        let mut rng = SplitMix64::seed_from_u64(budget.seed);
        let all: Vec<usize> = (0..n).collect();
        let eff_sources = sample_from(&all, budget.bfs_sources, &mut rng);
        let lcc_sources = sample_from(&lcc, budget.bfs_sources, &mut rng);
        (from_sources(g, &eff_sources), from_sources(g, &lcc_sources))
    };
    let mode = if exact { Mode::Exact } else { Mode::Approximate };

    let pairs: u64 = lcc_stats.iter().map(|s| s.pairs).sum();
    let total: u64 = lcc_stats.iter().map(|s| s.distance_sum).sum();
    let max_ecc = lcc_stats.iter().map(|s| s.eccentricity).max().unwrap_or(0).max(if exact { 0 } else { pseudo });
    let unreachable = exact && g.is_directed() && pairs < (lcc.len() * (lcc.len() - 1)) as u64;

    let mut diameter = Entry::exact("diameter", Value::Int(i64::from(max_ecc))).mode(mode);
    let mut aspl = if pairs == 0 {
        Entry::real("average_shortest_path_length", f64::NAN).note("no connected pairs")
    } else {
        Entry::real("average_shortest_path_length", total as f64 / pairs as f64).mode(mode)
    };
    let mut notes = Vec::new();
    if lcc_only {
        notes.push("lcc-only");
    }
    if unreachable {
        notes.push("reachable pairs only");
    }
    if !notes.is_empty() {
        diameter = diameter.note(notes.join("; "));
        if aspl.note.is_none() {
            aspl = aspl.note(notes.join("; "));
        }
    }

    let efficiency = if n < 2 {
        Entry::real("global_efficiency", f64::NAN).note("fewer than two nodes")
    } else {
        let per_source = eff_stats.iter().map(|s| s.efficiency).sum::<f64>() / eff_stats.len() as f64;
        Entry::real("global_efficiency", per_source / (n - 1) as f64).mode(mode)
    };
    vec![
        diameter,
        Entry::exact("pseudo_diameter", Value::Int(i64::from(pseudo))),
        aspl,
        efficiency,
    ]
}
