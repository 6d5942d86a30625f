//! Shared fixtures for the benchmarks.

use hilbert_core::geometry::{shapes, ConvexBody};
use hilbert_core::lab::boundary_param;
use hilbert_core::Point;

/// The bodies every kernel is timed on.
pub fn bodies() -> Vec<(&'static str, ConvexBody)> {
    vec![
        ("square", shapes::square()),
        ("disk", shapes::unit_disk()),
        ("hexagon", shapes::regular_polygon(6, 1.0).expect("hexagon")),
        ("cube", shapes::cube(3)),
    ]
}

pub fn pt(c: &[f64]) -> Point {
    Point::from_column_slice(c)
}

/// `k` boundary points of a planar body at evenly spaced angles.
pub fn boundary_samples(body: &ConvexBody, k: usize) -> Vec<Point> {
    (0..k)
        .map(|i| boundary_param(body, std::f64::consts::TAU * (i as f64 + 0.5) / k as f64).expect("planar body"))
        .collect()
}
