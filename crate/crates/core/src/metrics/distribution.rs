use super::clustering::coreness;
use super::{Entry, LabeledGraph};

/// Gini coefficient of a non-negative sequence; NaN when empty or when the
/// mean is zero.
pub fn gini(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.is_empty() || mean <= 0.0 {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i + 1) as f64 - n - 1.0) * x)
        .sum();
    weighted / (n * n * mean)
}

/// Discrete maximum-likelihood exponent over the positive values, with the
/// smallest positive value as lower cutoff.
fn power_law_exponent(degrees: &[f64]) -> Option<f64> {
    let positive: Vec<f64> = degrees.iter().copied().filter(|&d| d > 0.0).collect();
    let d_min = positive.iter().copied().reduce(f64::min)?;
    let s: f64 = positive.iter().map(|d| (d / (d_min - 0.5)).ln()).sum();
    Some(1.0 + positive.len() as f64 / s)
}

/// Continuous maximum-likelihood Pareto shape; `None` when every positive
/// value equals the minimum.
fn pareto_exponent(degrees: &[f64]) -> Option<f64> {
    let positive: Vec<f64> = degrees.iter().copied().filter(|&d| d > 0.0).collect();
    let d_min = positive.iter().copied().reduce(f64::min)?;
    let s: f64 = positive.iter().map(|d| (d / d_min).ln()).sum();
    (s > 0.0).then(|| positive.len() as f64 / s)
}

pub(crate) fn distribution_properties(g: &LabeledGraph) -> Vec<Entry> {
    let degrees: Vec<f64> = (0..g.num_nodes()).map(|u| g.degree(u) as f64).collect();
    let cores: Vec<f64> = coreness(g).into_iter().map(|c| c as f64).collect();
    let undefined = |name, note: &str| Entry::real(name, f64::NAN).note(note);
    vec![
        power_law_exponent(&degrees)
            .map_or_else(|| undefined("power_law_exponent", "no positive degree"), |a| Entry::real("power_law_exponent", a)),
        pareto_exponent(&degrees).map_or_else(
            || undefined("pareto_exponent", "degenerate degree sequence"),
            |a| Entry::real("pareto_exponent", a),
        ),
        match gini(&degrees) {
            x if x.is_nan() => undefined("gini_degree", "all degrees are zero"),
            x => Entry::real("gini_degree", x),
        },
        match gini(&cores) {
            x if x.is_nan() => undefined("gini_coreness", "all coreness values are zero"),
            x => Entry::real("gini_coreness", x),
        },
    ]
}
