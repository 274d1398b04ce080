//! Brute-force reference implementations of the graph metrics, written
//! from the definitions with dense matrices and no shared code.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

pub struct Dense {
    pub n: usize,
    pub directed: bool,
    pub m: usize,
    /// a[u][v]: arc u -> v, self-loops dropped, symmetric when undirected
    pub a: Vec<Vec<bool>>,
}

impl Dense {
    pub fn new(n: usize, directed: bool, edges: &[(usize, usize)]) -> Self {
        let mut a = vec![vec![false; n]; n];
        for &(u, v) in edges {
            if u != v {
                a[u][v] = true;
                if !directed {
                    a[v][u] = true;
                }
            }
        }
        Dense { n, directed, m: edges.len(), a }
    }

    pub fn out_deg(&self, u: usize) -> usize {
        self.a[u].iter().filter(|&&x| x).count()
    }

    pub fn in_deg(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.a[v][u]).count()
    }

    pub fn linked(&self, u: usize, v: usize) -> bool {
        self.a[u][v] || self.a[v][u]
    }

    pub fn und_deg(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.linked(u, v)).count()
    }

    pub fn degree(&self, u: usize) -> usize {
        if self.directed {
            self.out_deg(u) + self.in_deg(u)
        } else {
            self.und_deg(u)
        }
    }

    /// Floyd–Warshall; `None` for unreachable pairs.
    pub fn distances(&self) -> Vec<Vec<Option<u64>>> {
        let n = self.n;
        let mut d = vec![vec![None; n]; n];
        for u in 0..n {
            d[u][u] = Some(0);
            for v in 0..n {
                if self.a[u][v] {
                    d[u][v] = Some(1);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let Some(dik) = d[i][k] else { continue };
                for j in 0..n {
                    if let Some(dkj) = d[k][j] {
                        if d[i][j].is_none_or(|x| dik + dkj < x) {
                            d[i][j] = Some(dik + dkj);
                        }
                    }
                }
            }
        }
        d
    }

    /// Members of the largest weakly connected component (union-find; ties
    /// go to the component with the smallest node).
    pub fn lcc(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for u in 0..self.n {
            for v in 0..self.n {
                if self.a[u][v] {
                    let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for u in 0..self.n {
            let r = find(&mut parent, u);
            groups.entry(r).or_default().push(u);
        }
        let mut best: Vec<usize> = Vec::new();
        for (_, g) in groups {
            if g.len() > best.len() {
                best = g;
            }
        }
        best
    }

    pub fn lscc_size(&self, d: &[Vec<Option<u64>>]) -> usize {
        (0..self.n)
            .map(|u| (0..self.n).filter(|&v| d[u][v].is_some() && d[v][u].is_some()).count())
            .max()
            .unwrap_or(0)
    }

    /// Explicit split network: node x has entry 2x and exit 2x+1.
    pub fn network(&self) -> Network {
        let mut net = Network { adj: vec![Vec::new(); 2 * self.n], to: Vec::new(), cap: Vec::new() };
        for x in 0..self.n {
            net.add(2 * x, 2 * x + 1);
        }
        for x in 0..self.n {
            for y in 0..self.n {
                if self.a[x][y] {
                    net.add(2 * x + 1, 2 * y);
                }
            }
        }
        net
    }
}

pub struct Network {
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
}

impl Network {
    fn add(&mut self, u: usize, v: usize) {
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(1);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Maximum number of internally vertex-disjoint s-t paths, by plain
    /// depth-first Ford–Fulkerson. Stops early once the flow equals the
    /// out-degree of `s` or the in-degree of `t`, which bound it from above.
    pub fn local_connectivity(&mut self, s: usize, t: usize, bound: usize) -> usize {
        // the internal arc of each node is the first arc of its entry half
        let (is, it) = (self.adj[2 * s][0], self.adj[2 * t][0]);
        self.cap[is] = 1 << 30;
        self.cap[it] = 1 << 30;
        let (source, sink) = (2 * s + 1, 2 * t);
        // arc into the sink, per half
        let mut into_sink = vec![None; self.adj.len()];
        for &e in &self.adj[sink] {
            into_sink[self.to[e]] = Some(e ^ 1);
        }
        let mut search = Search { seen: vec![0; self.adj.len()], stamp: 0, into_sink };
        let mut used = Vec::new();
        let mut flow = 0;
        while flow < bound {
            search.stamp += 1;
            let mut path = Vec::new();
            if !self.dfs(source, sink, &mut search, &mut path) {
                break;
            }
            for e in path {
                self.cap[e] -= 1;
                self.cap[e ^ 1] += 1;
                used.push(e);
            }
            flow += 1;
        }
        for e in used {
            self.cap[e] += 1;
            self.cap[e ^ 1] -= 1;
        }
        self.cap[is] = 1;
        self.cap[it] = 1;
        flow
    }

    fn dfs(&self, u: usize, sink: usize, search: &mut Search, path: &mut Vec<usize>) -> bool {
        if u == sink {
            return true;
        }
        search.seen[u] = search.stamp;
        if let Some(e) = search.into_sink[u].filter(|&e| self.cap[e] > 0) {
            path.push(e);
            return true;
        }
        for &e in &self.adj[u] {
            let v = self.to[e];
            if self.cap[e] > 0 && search.seen[v] != search.stamp {
                path.push(e);
                if self.dfs(v, sink, search, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
}

struct Search {
    seen: Vec<u64>,
    stamp: u64,
    into_sink: Vec<Option<usize>>,
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let cov = n * sxy - sx * sy;
    let var = (n * sxx - sx * sx) * (n * syy - sy * sy);
    if var <= 1e-12 {
        f64::NAN
    } else {
        cov / var.sqrt()
    }
}

/// Gini via the mean absolute difference.
pub fn gini(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let mut diff = 0.0;
    for a in xs {
        for b in xs {
            diff += (a - b).abs();
        }
    }
    diff / (2.0 * n * n * mean)
}

/// Coreness by repeated threshold deletion.
pub fn coreness(g: &Dense) -> Vec<usize> {
    let n = g.n;
    let mut alive = vec![true; n];
    let mut core = vec![0; n];
    let mut left = n;
    let mut k = 0;
    while left > 0 {
        loop {
            let doomed: Vec<usize> = (0..n)
                .filter(|&u| alive[u] && (0..n).filter(|&v| alive[v] && g.linked(u, v)).count() <= k)
                .collect();
            if doomed.is_empty() {
                break;
            }
            for u in doomed {
                alive[u] = false;
                core[u] = k;
                left -= 1;
            }
        }
        k += 1;
    }
    core
}

/// Mean local node connectivity over non-adjacent pairs, ordered when the
/// graph is directed. Kept apart from [`metrics`] because it dominates the
/// oracle's cost and is only comparable when computed exactly.
pub fn average_node_connectivity(g: &Dense) -> f64 {
    let n = g.n;
    let mut net = g.network();
    let mut conn = Vec::new();
    for s in 0..n {
        for t in 0..n {
            let ordered_ok = if g.directed { s != t } else { s < t };
            if ordered_ok && !g.a[s][t] {
                conn.push(net.local_connectivity(s, t, g.out_deg(s).min(g.in_deg(t))) as f64);
            }
        }
    }
    if conn.is_empty() { f64::NAN } else { conn.iter().sum::<f64>() / conn.len() as f64 }
}

/// Every exact-mode metric of the catalogue other than node connectivity,
/// computed by brute force.
pub fn metrics(g: &Dense, labels: Option<&[i64]>, features: Option<&[Vec<f64>]>) -> BTreeMap<&'static str, f64> {
    let n = g.n;
    let nf = n as f64;
    let m = g.m as f64;
    let mut out = BTreeMap::new();
    out.insert("num_nodes", nf);
    out.insert("num_edges", m);
    out.insert("is_directed", if g.directed { 1.0 } else { 0.0 });
    let k = if g.directed { 1.0 } else { 2.0 };
    out.insert("edge_density", k * m / (nf * (nf - 1.0)));
    out.insert("average_degree", k * m / nf);

    let arcs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| g.a[u][v]).collect();
    let mutual = arcs.iter().filter(|&&(u, v)| g.a[v][u]).count() as f64;
    out.insert("edge_reciprocity", if g.directed { mutual / arcs.len() as f64 } else { 1.0 });
    let xs: Vec<f64> = arcs.iter().map(|&(u, _)| g.out_deg(u) as f64).collect();
    let ys: Vec<f64> = arcs.iter().map(|&(_, v)| g.in_deg(v) as f64).collect();
    out.insert("degree_assortativity", pearson(&xs, &ys));

    let d = g.distances();
    let lcc = g.lcc();
    let (mut diameter, mut total, mut pairs) = (0u64, 0u64, 0u64);
    for &u in &lcc {
        for &v in &lcc {
            if let (true, Some(x)) = (u != v, d[u][v]) {
                diameter = diameter.max(x);
                total += x;
                pairs += 1;
            }
        }
    }
    out.insert("diameter", diameter as f64);
    out.insert("average_shortest_path_length", if pairs == 0 { f64::NAN } else { total as f64 / pairs as f64 });
    let mut eff = 0.0;
    for u in 0..n {
        for v in 0..n {
            if let (true, Some(x)) = (u != v, d[u][v]) {
                eff += 1.0 / x as f64;
            }
        }
    }
    out.insert("global_efficiency", eff / (nf * (nf - 1.0)));
    out.insert("relative_lcc_size", lcc.len() as f64 / nf);
    out.insert("relative_lscc_size", if g.directed { g.lscc_size(&d) as f64 } else { lcc.len() as f64 } / nf);

    // clustering
    let mut local = Vec::with_capacity(n);
    for i in 0..n {
        if g.directed {
            let s = |x: usize, y: usize| f64::from(u8::from(g.a[x][y])) + f64::from(u8::from(g.a[y][x]));
            let mut cube = 0.0;
            for j in 0..n {
                for h in 0..n {
                    cube += s(i, j) * s(j, h) * s(h, i);
                }
            }
            let tot = (g.out_deg(i) + g.in_deg(i)) as f64;
            let rec = (0..n).filter(|&j| g.a[i][j] && g.a[j][i]).count() as f64;
            let denom = 2.0 * (tot * (tot - 1.0) - 2.0 * rec);
            local.push(if denom <= 0.0 { 0.0 } else { cube / denom });
        } else {
            let nb: Vec<usize> = (0..n).filter(|&v| g.a[i][v]).collect();
            let dd = nb.len() as f64;
            let mut links = 0.0;
            for (x, &v) in nb.iter().enumerate() {
                for &w in &nb[x + 1..] {
                    if g.a[v][w] {
                        links += 1.0;
                    }
                }
            }
            local.push(if nb.len() < 2 { 0.0 } else { 2.0 * links / (dd * (dd - 1.0)) });
        }
    }
    out.insert("average_clustering_coefficient", local.iter().sum::<f64>() / nf);
    let mut triangles = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for h in j + 1..n {
                if g.linked(i, j) && g.linked(j, h) && g.linked(i, h) {
                    triangles += 1.0;
                }
            }
        }
    }
    let triads: f64 = (0..n).map(|u| (g.und_deg(u) * g.und_deg(u).saturating_sub(1) / 2) as f64).sum();
    out.insert("transitivity", if triads == 0.0 { 0.0 } else { 3.0 * triangles / triads });
    let core = coreness(g);
    out.insert("degeneracy", core.iter().copied().max().unwrap_or(0) as f64);

    // distribution
    let degs: Vec<f64> = (0..n).map(|u| g.degree(u) as f64).collect();
    let pos: Vec<f64> = degs.iter().copied().filter(|&x| x > 0.0).collect();
    let dmin = pos.iter().copied().fold(f64::INFINITY, f64::min);
    let pl = 1.0 + pos.len() as f64 / pos.iter().map(|x| (x / (dmin - 0.5)).ln()).sum::<f64>();
    out.insert("power_law_exponent", if pos.is_empty() { f64::NAN } else { pl });
    let pareto_sum: f64 = pos.iter().map(|x| (x / dmin).ln()).sum();
    out.insert("pareto_exponent", if pareto_sum > 0.0 { pos.len() as f64 / pareto_sum } else { f64::NAN });
    out.insert("gini_degree", gini(&degs));
    out.insert("gini_coreness", gini(&core.iter().map(|&c| c as f64).collect::<Vec<_>>()));

    if let Some(y) = labels {
        let edges: Vec<(usize, usize)> = arcs.iter().copied().filter(|&(u, v)| g.directed || u < v).collect();
        let same = edges.iter().filter(|&&(u, v)| y[u] == y[v]).count() as f64;
        out.insert("edge_homogeneity", same / edges.len() as f64);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for &(u, v) in &arcs {
            xs.push(y[u] as f64);
            ys.push(y[v] as f64);
        }
        out.insert("attribute_assortativity", pearson(&xs, &ys));
        let classes: std::collections::BTreeSet<i64> = y.iter().copied().collect();
        let mut h = 0.0;
        for &c in &classes {
            let members: Vec<usize> = (0..n).filter(|&u| y[u] == c).collect();
            let mut same_nb = 0.0;
            let mut all_nb = 0.0;
            for &u in &members {
                for v in 0..n {
                    if g.linked(u, v) {
                        all_nb += 1.0;
                        if y[v] == c {
                            same_nb += 1.0;
                        }
                    }
                }
            }
            let hk = if all_nb == 0.0 { 0.0 } else { same_nb / all_nb };
            h += (hk - members.len() as f64 / nf).max(0.0);
        }
        out.insert(
            "homophily_measure",
            if classes.len() < 2 { f64::NAN } else { h / (classes.len() - 1) as f64 },
        );
        if let Some(x) = features {
            let sim = |a: &[f64], b: &[f64]| {
                let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
                let aa: f64 = a.iter().map(|p| p * p).sum();
                let bb: f64 = b.iter().map(|q| q * q).sum();
                let cross = (aa * bb - dot * dot).max(0.0).sqrt();
                1.0 - cross.atan2(dot) / std::f64::consts::PI
            };
            let (mut w, mut b) = (Vec::new(), Vec::new());
            for &(u, v) in &edges {
                let s = sim(&x[u], &x[v]);
                if y[u] == y[v] {
                    w.push(s);
                } else {
                    b.push(s);
                }
            }
            let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
            out.insert("average_within_class_angular_similarity", mean(&w));
            out.insert("average_between_class_angular_similarity", mean(&b));
            out.insert("feature_angular_snr", mean(&w) / mean(&b));
        }
    }
    out
}

/// Erdős–Rényi G(n, p) edge list; each unordered (or ordered, when
/// directed) pair is drawn independently.
pub fn erdos_renyi(rng: &mut SplitMix64, n: usize, p: f64, directed: bool) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// `|a - b| <= tol * max(|a|, |b|)`, with NaN equal to NaN and a tiny
/// absolute floor for values that should be zero.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    if a.is_nan() || b.is_nan() {
        return a.is_nan() && b.is_nan();
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()) || (a - b).abs() <= 1e-12
}
