use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use super::distance::largest_component;
use super::{ApproxBudget, Entry, LabeledGraph, Mode};

pub(crate) fn component_sizes(g: &LabeledGraph) -> Vec<Entry> {
    let n = g.num_nodes();
    if n == 0 {
        return vec![
            Entry::real("relative_lcc_size", f64::NAN).note("empty graph"),
            Entry::real("relative_lscc_size", f64::NAN).note("empty graph"),
        ];
    }
    let lcc = largest_component(g).1.len() as f64 / n as f64;
    let lscc = if g.is_directed() {
        Entry::real("relative_lscc_size", largest_strong_component(g) as f64 / n as f64)
    } else {
        Entry::real("relative_lscc_size", lcc).note("undirected: equals the largest component")
    };
    vec![Entry::real("relative_lcc_size", lcc), lscc]
}

/// Size of the largest strongly connected component (Kosaraju, iterative).
fn largest_strong_component(g: &LabeledGraph) -> usize {
    let n = g.num_nodes();
    let (out, inn) = (g.out_adj(), g.in_adj());
    let mut seen = vec![false; n];
    let mut finish = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some((u, i)) = stack.last_mut() {
            let u = *u;
            if let Some(&v) = out.neighbors(u).get(*i) {
                *i += 1;
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, 0));
                }
            } else {
                finish.push(u);
                stack.pop();
            }
        }
    }
    let mut assigned = vec![false; n];
    let mut best = 0;
    for &s in finish.iter().rev() {
        if assigned[s] {
            continue;
        }
        assigned[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in inn.neighbors(u) {
                if !assigned[v] {
                    assigned[v] = true;
                    stack.push(v);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Residual state for unit-capacity vertex-disjoint path search. Every node
/// `x` is split into an entry half `2x` and an exit half `2x + 1`, joined by
/// an arc of capacity one; each graph arc runs from an exit half to an
/// entry half. Paths are found with Dinic's level-graph method.
struct FlowState {
    arc_flow: Vec<bool>,
    node_used: Vec<bool>,
    touched_arcs: Vec<usize>,
    touched_nodes: Vec<usize>,
    level: Vec<u32>,
    // next residual arc to try from each half during a blocking-flow pass
    cursor: Vec<usize>,
    visited: Vec<usize>,
}

const UNSEEN: u32 = u32::MAX;
const DEAD: u32 = u32::MAX - 1;

#[derive(Clone, Copy, PartialEq)]
enum Step {
    None,
    Internal,
    InternalBack,
    Arc(usize),
    ArcBack(usize),
}

/// Arc ids entering each node, indexing the flat successor list, plus the
/// tail node of every arc.
struct Incoming {
    offsets: Vec<usize>,
    arcs: Vec<usize>,
    tails: Vec<usize>,
}

impl Incoming {
    fn build(g: &LabeledGraph) -> Self {
        let n = g.num_nodes();
        let out = g.out_adj();
        let mut lists = vec![Vec::new(); n];
        let mut tails = Vec::with_capacity(out.arcs());
        for u in 0..n {
            for (i, &v) in out.neighbors(u).iter().enumerate() {
                lists[v].push(out.offset(u) + i);
                tails.push(u);
            }
        }
        let mut offsets = vec![0];
        let mut arcs = Vec::with_capacity(out.arcs());
        for l in lists {
            arcs.extend(l);
            offsets.push(arcs.len());
        }
        Incoming { offsets, arcs, tails }
    }

    fn of(&self, v: usize) -> &[usize] {
        &self.arcs[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// The graph being cut plus the chosen terminals.
struct Network<'a> {
    g: &'a LabeledGraph,
    incoming: &'a Incoming,
    s: usize,
    t: usize,
}

impl Network<'_> {
    /// Number of residual arc slots leaving half `h`; slot 0 is the
    /// internal arc, the rest follow the node's arc list.
    fn slots(&self, h: usize) -> usize {
        let x = h / 2;
        1 + if h.is_multiple_of(2) { self.incoming.of(x).len() } else { self.g.out_adj().degree(x) }
    }
}

impl FlowState {
    fn new(g: &LabeledGraph) -> Self {
        FlowState {
            arc_flow: vec![false; g.out_adj().arcs()],
            node_used: vec![false; g.num_nodes()],
            touched_arcs: Vec::new(),
            touched_nodes: Vec::new(),
            level: vec![UNSEEN; 2 * g.num_nodes()],
            cursor: vec![0; 2 * g.num_nodes()],
            visited: Vec::new(),
        }
    }

    fn set_arc(&mut self, a: usize, on: bool) {
        self.arc_flow[a] = on;
        self.touched_arcs.push(a);
    }

    fn set_node(&mut self, x: usize, on: bool) {
        self.node_used[x] = on;
        self.touched_nodes.push(x);
    }

    fn reset(&mut self) {
        for a in self.touched_arcs.drain(..) {
            self.arc_flow[a] = false;
        }
        for x in self.touched_nodes.drain(..) {
            self.node_used[x] = false;
        }
    }

    /// Target and step of residual slot `i` of half `h`, if it has capacity.
    fn residual(&self, net: &Network, h: usize, i: usize) -> Option<(usize, Step)> {
        let x = h / 2;
        let terminal = x == net.s || x == net.t;
        if h.is_multiple_of(2) {
            if i == 0 {
                return (terminal || !self.node_used[x]).then_some((2 * x + 1, Step::Internal));
            }
            let a = net.incoming.of(x)[i - 1];
            self.arc_flow[a].then(|| (2 * net.incoming.tails[a] + 1, Step::ArcBack(a)))
        } else {
            if i == 0 {
                return (!terminal && self.node_used[x]).then_some((2 * x, Step::InternalBack));
            }
            let out = net.g.out_adj();
            let a = out.offset(x) + i - 1;
            (!self.arc_flow[a]).then(|| (2 * out.neighbors(x)[i - 1], Step::Arc(a)))
        }
    }

    /// Breadth-first levels from the source; true when the sink is reached.
    fn build_levels(&mut self, net: &Network, source: usize, sink: usize) -> bool {
        for h in self.visited.drain(..) {
            self.level[h] = UNSEEN;
            self.cursor[h] = 0;
        }
        self.level[source] = 0;
        self.visited.push(source);
        let mut head = 0;
        while head < self.visited.len() {
            let h = self.visited[head];
            head += 1;
            for i in 0..net.slots(h) {
                if let Some((v, _)) = self.residual(net, h, i) {
                    if self.level[v] == UNSEEN {
                        self.level[v] = self.level[h] + 1;
                        self.visited.push(v);
                        if v == sink {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Pushes unit paths along the level graph until it is blocked or
    /// `limit` paths were found; returns the number pushed.
    fn blocking_flow(&mut self, net: &Network, source: usize, sink: usize, limit: usize) -> usize {
        let mut pushed = 0;
        let mut stack: Vec<(usize, Step)> = vec![(source, Step::None)];
        while let Some(&(h, _)) = stack.last() {
            if h == sink {
                for &(v, step) in &stack[1..] {
                    match step {
                        Step::Internal => self.set_node(v / 2, true),
                        Step::InternalBack => self.set_node(v / 2, false),
                        Step::Arc(a) => self.set_arc(a, true),
                        Step::ArcBack(a) => self.set_arc(a, false),
                        Step::None => {}
                    }
                }
                pushed += 1;
                if pushed == limit {
                    break;
                }
                stack.truncate(1);
                continue;
            }
            let mut next = None;
            while self.cursor[h] < net.slots(h) {
                match self.residual(net, h, self.cursor[h]) {
                    Some((v, step)) if self.level[v] == self.level[h] + 1 => {
                        next = Some((v, step));
                        break;
                    }
                    _ => self.cursor[h] += 1,
                }
            }
            match next {
                Some(entry) => stack.push(entry),
                None => {
                    self.level[h] = DEAD;
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        self.cursor[p] += 1;
                    }
                }
            }
        }
        pushed
    }

    /// Maximum number of internally vertex-disjoint paths from `s` to a
    /// non-adjacent `t`.
    fn local_connectivity(&mut self, g: &LabeledGraph, incoming: &Incoming, s: usize, t: usize) -> usize {
        let (out, inn) = (g.out_adj(), g.in_adj());
        let bound = out.degree(s).min(inn.degree(t));
        let mut k = 0;
        // paths of length two through common neighbours are disjoint
        for (i, &w) in out.neighbors(s).iter().enumerate() {
            if let Ok(j) = out.neighbors(w).binary_search(&t) {
                self.set_arc(out.offset(s) + i, true);
                self.set_node(w, true);
                self.set_arc(out.offset(w) + j, true);
                k += 1;
            }
        }
        let net = Network { g, incoming, s, t };
        let (source, sink) = (2 * s + 1, 2 * t);
        while k < bound && self.build_levels(&net, source, sink) {
            k += self.blocking_flow(&net, source, sink, bound - k);
        }
        self.reset();
        k
    }
}

pub(crate) fn average_node_connectivity(g: &LabeledGraph, budget: &ApproxBudget) -> Entry {
    const NAME: &str = "average_node_connectivity";
    let n = g.num_nodes();
    let out = g.out_adj();
    let all_pairs = if g.is_directed() { n * n.saturating_sub(1) } else { n * n.saturating_sub(1) / 2 };
    let linked = if g.is_directed() { out.arcs() } else { out.arcs() / 2 };
    let open = all_pairs - linked;
    if open == 0 {
        return Entry::real(NAME, f64::NAN).note("no non-adjacent pairs");
    }
    let exact = open <= budget.exact_pairs;
    let pairs: Vec<(usize, usize)> = if exact {
        let mut v = Vec::with_capacity(open);
        for s in 0..n {
            let range: Box<dyn Iterator<Item = usize>> =
                if g.is_directed() { Box::new(0..n) } else { Box::new(s + 1..n) };
            for t in range {
                if s != t && !out.contains(s, t) {
                    v.push((s, t));
                }
            }
        }
        v
    } else {
        let mut rng = SplitMix64::seed_from_u64(budget.seed);
        let mut v = Vec::with_capacity(budget.sample_pairs);
        let mut attempts = 0usize;
        while v.len() < budget.sample_pairs && attempts < budget.sample_pairs.saturating_mul(1000) {
            attempts += 1;
            let s = rng.random_range(0..n);
            let t = rng.random_range(0..n);
            if s != t && !out.contains(s, t) {
                v.push(if g.is_directed() { (s, t) } else { (s.min(t), s.max(t)) });
            }
        }
        v
    };
    if pairs.is_empty() {
        return Entry::real(NAME, f64::NAN).mode(Mode::Approximate).note("no non-adjacent pair sampled");
    }
    let incoming = Incoming::build(g);
    let values: Vec<usize> = pairs
        .par_iter()
        .map_init(|| FlowState::new(g), |state, &(s, t)| state.local_connectivity(g, &incoming, s, t))
        .collect();
    let mean = values.iter().sum::<usize>() as f64 / values.len() as f64;
    let entry = Entry::real(NAME, mean);
    if exact {
        entry
    } else {
        entry.mode(Mode::Approximate).note(format!("{} sampled pairs", values.len()))
    }
}
