//! Gauss-Legendre panels shared by the quadrature routines.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

fn rule(order: usize, cell: &'static OnceLock<Vec<(f64, f64)>>) -> &'static [(f64, f64)] {
    cell.get_or_init(|| {
        let degree = NonZeroUsize::new(order).expect("nonzero order");
        let mut pairs = GaussLegendre::new(degree).as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// 8-point rule on [−1, 1], nodes ascending.
pub(crate) fn gl8() -> &'static [(f64, f64)] {
    static CELL: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    rule(8, &CELL)
}

/// 16-point rule on [−1, 1], nodes ascending.
pub(crate) fn gl16() -> &'static [(f64, f64)] {
    static CELL: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    rule(16, &CELL)
}

/// Maps `rule` onto `[a, b]`, appending `(x, w)` pairs.
pub(crate) fn push_panel(out: &mut Vec<(f64, f64)>, rule: &[(f64, f64)], a: f64, b: f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    out.extend(rule.iter().map(|&(x, w)| (mid + half * x, half * w)));
}

/// `∫_a^b f` with `rule`.
#[cfg(test)]
pub(crate) fn integrate<F: FnMut(f64) -> f64>(rule: &[(f64, f64)], a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Geometric edges `h, h·ratio, h·ratio², …` down to `floor`, returned
/// ascending and ending at `h`.
pub(crate) fn graded_edges(h: f64, ratio: f64, floor: f64) -> Vec<f64> {
    let mut edges = vec![h];
    let mut x = h;
    while x > floor {
        x *= ratio;
        edges.push(x);
    }
    edges.reverse();
    edges
}
