use std::collections::BTreeMap;

use super::{pearson, Entry, LabeledGraph};

const FEATURE_METRICS: [&str; 3] = [
    "average_within_class_angular_similarity",
    "average_between_class_angular_similarity",
    "feature_angular_snr",
];

/// `1 - θ / π` for the angle θ between the rows; `None` when either row is
/// zero or the widths differ. The angle comes from the half-angle form
/// `2 atan2(|â - b̂|, |â + b̂|)`, which stays accurate for nearly parallel rows.
fn angular_similarity(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.is_empty() {
        return None;
    }
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (p, q) = (x / na, y / nb);
        diff += (p - q) * (p - q);
        sum += (p + q) * (p + q);
    }
    let theta = 2.0 * diff.sqrt().atan2(sum.sqrt());
    Some(1.0 - theta / std::f64::consts::PI)
}

/// Class-size-adjusted homophily over the subgraph induced by labelled
/// nodes, direction ignored. `None` with fewer than two classes.
pub fn homophily_measure(g: &LabeledGraph) -> Option<f64> {
    let labels = g.labels()?;
    let adj = g.und_adj();
    // per class: (node count, same-class neighbour total, neighbour total)
    let mut classes: BTreeMap<i64, (usize, usize, usize)> = BTreeMap::new();
    let mut labelled = 0;
    for (u, y) in labels.iter().enumerate() {
        let Some(y) = *y else { continue };
        labelled += 1;
        let entry = classes.entry(y).or_default();
        entry.0 += 1;
        for &v in adj.neighbors(u) {
            match labels[v] {
                Some(z) if z == y => {
                    entry.1 += 1;
                    entry.2 += 1;
                }
                Some(_) => entry.2 += 1,
                None => {}
            }
        }
    }
    let c = classes.len();
    if c < 2 {
        return None;
    }
    let total: f64 = classes
        .values()
        .map(|&(size, same, all)| {
            let h = if all == 0 { 0.0 } else { same as f64 / all as f64 };
            (h - size as f64 / labelled as f64).max(0.0)
        })
        .sum();
    Some(total / (c - 1) as f64)
}

pub(crate) fn attribute_properties(g: &LabeledGraph) -> Vec<Entry> {
    let Some(labels) = g.labels() else {
        return ["edge_homogeneity"]
            .into_iter()
            .chain(FEATURE_METRICS)
            .chain(["homophily_measure", "attribute_assortativity"])
            .map(|name| Entry::skipped(name, "no labels"))
            .collect();
    };
    let edges: Vec<(usize, usize, i64, i64)> = g
        .simple_edges()
        .into_iter()
        .filter_map(|(u, v)| Some((u, v, labels[u]?, labels[v]?)))
        .collect();

    let homogeneity = if edges.is_empty() {
        Entry::real("edge_homogeneity", f64::NAN).note("no edge between labelled nodes")
    } else {
        let same = edges.iter().filter(|e| e.2 == e.3).count();
        Entry::real("edge_homogeneity", same as f64 / edges.len() as f64)
    };

    let features = match g.features() {
        None => FEATURE_METRICS.iter().map(|name| Entry::skipped(name, "no features")).collect(),
        Some(rows) => {
            let (mut within, mut between, mut skipped) = (Vec::new(), Vec::new(), 0);
            for &(u, v, yu, yv) in &edges {
                match angular_similarity(&rows[u], &rows[v]) {
                    Some(s) if yu == yv => within.push(s),
                    Some(s) => between.push(s),
                    None => skipped += 1,
                }
            }
            let mean = |xs: &[f64]| {
                if xs.is_empty() {
                    f64::NAN
                } else {
                    xs.iter().sum::<f64>() / xs.len() as f64
                }
            };
            let (w, b) = (mean(&within), mean(&between));
            let skip_note = (skipped > 0).then(|| format!("{skipped} edge(s) with zero or missing feature rows skipped"));
            let with_note = |e: Entry| match &skip_note {
                Some(n) => e.note(n.clone()),
                None => e,
            };
            let snr = if w.is_nan() || b.is_nan() || b == 0.0 {
                Entry::real("feature_angular_snr", f64::NAN).note("between-class similarity undefined or zero")
            } else {
                with_note(Entry::real("feature_angular_snr", w / b))
            };
            vec![
                if within.is_empty() {
                    Entry::real(FEATURE_METRICS[0], f64::NAN).note("no within-class edge")
                } else {
                    with_note(Entry::real(FEATURE_METRICS[0], w))
                },
                if between.is_empty() {
                    Entry::real(FEATURE_METRICS[1], f64::NAN).note("no between-class edge")
                } else {
                    with_note(Entry::real(FEATURE_METRICS[1], b))
                },
                snr,
            ]
        }
    };

    let homophily = match homophily_measure(g) {
        Some(h) => Entry::real("homophily_measure", h),
        None => Entry::real("homophily_measure", f64::NAN).note("fewer than two classes"),
    };

    let mut pairs = Vec::with_capacity(2 * edges.len());
    for &(_, _, yu, yv) in &edges {
        pairs.push((yu as f64, yv as f64));
        if !g.is_directed() {
            pairs.push((yv as f64, yu as f64));
        }
    }
    let assortativity = match pearson(&pairs) {
        Some(r) => Entry::real("attribute_assortativity", r),
        None => Entry::real("attribute_assortativity", f64::NAN).note("zero label variance over linked pairs"),
    };

    let mut out = vec![homogeneity];
    out.extend(features);
    out.push(homophily);
    out.push(assortativity);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angular_similarity_extremes() {
        assert_eq!(angular_similarity(&[1.0, 0.0], &[2.0, 0.0]), Some(1.0));
        assert_eq!(angular_similarity(&[1.0, 0.0], &[0.0, 1.0]), Some(0.5));
        assert_eq!(angular_similarity(&[1.0, 0.0], &[-1.0, 0.0]), Some(0.0));
        assert_eq!(angular_similarity(&[0.0, 0.0], &[1.0, 0.0]), None);
    }
}
