//! Coverage and scalability formulas for planning anchor deployments.
//!
//! A square workspace whose four corner nodes must all reach the robot can
//! have side at most `r / sqrt(2)`, bounding the covered area; the
//! rectangular generalization and the node count for replicated unit areas
//! follow the same diagonal argument.

/// Maximum square workspace area coverable with sensing range `r`: `r^2 / 2`.
pub fn square_coverage_area(sensing_range: f64) -> f64 {
    debug_assert!(sensing_range > 0.0);
    sensing_range * sensing_range / 2.0
}

/// Maximum rectangular workspace area with aspect factor `k` (width = k *
/// length): `r^2 * k / (1 + k^2)`. Maximized at `k = 1`, the square case.
pub fn rect_coverage_area(sensing_range: f64, aspect_k: f64) -> f64 {
    debug_assert!(sensing_range > 0.0 && aspect_k > 0.0);
    sensing_range * sensing_range * aspect_k / (1.0 + aspect_k * aspect_k)
}

/// Minimum number of anchor nodes to cover `n_units` replicated unit areas:
/// `2n + 2` (each added unit shares an edge pair with the previous one).
pub fn nodes_required(n_units: u64) -> u64 {
    debug_assert!(n_units >= 1);
    2 * n_units + 2
}
