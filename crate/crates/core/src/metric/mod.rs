//! The Hilbert distance, its geodesic rays and metric spheres.

mod geodesic;
mod sphere;

use serde::{Deserialize, Serialize};

pub use geodesic::{GeodesicRay, RaySummary};
pub use sphere::{metric_sphere, metric_sphere_directions, SphereSample};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{AnchoredPoint, Chord, ConvexBody, Point};

/// Points closer than this (relative to the circumradius) are treated as equal.
pub const COINCIDENCE_TOL: f64 = 1e-13;

/// Chord parameters within this distance of 0 or 1 flag lost digits.
pub const NEAR_BOUNDARY_TOL: f64 = 1e-12;

/// `[a, p, q, b] = ((1 - s) / s) * (t / (1 - t))` for collinear points with
/// `p = (1 - s) a + s b`, `q = (1 - t) a + t b` and `0 < s <= t < 1`.
pub fn cross_ratio(a: &Point, p: &Point, q: &Point, b: &Point) -> Result<f64> {
    let m = a.len();
    for x in [p, q, b] {
        if x.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: x.len() });
        }
    }
    let chord = Chord::new(a.clone(), b.clone())?;
    let len = chord.length();
    for x in [p, q] {
        let u = chord.param(x);
        if (chord.point(u) - x).norm() > 1e-9 * len {
            return Err(Error::NonCollinear);
        }
    }
    let s = chord.param(p);
    let t = chord.param(q);
    if !(s > 0.0 && s <= t && t < 1.0) {
        return Err(Error::OrderViolated { s, t });
    }
    Ok(((1.0 - s) / s) * (t / (1.0 - t)))
}

/// Full result of a distance query.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistanceReport {
    pub distance: f64,
    /// `None` when `p` and `q` coincide.
    pub chord: Option<Chord>,
    pub s: f64,
    pub t: f64,
    /// `s` or `t` is within [`NEAR_BOUNDARY_TOL`] of `{0, 1}`.
    pub precision_warning: bool,
}

/// `d_C(p, q)` together with the chord and the parameters `s`, `t`.
pub fn distance_report(body: &ConvexBody, p: &Point, q: &Point) -> Result<DistanceReport> {
    if !body.is_interior(p)? || !body.is_interior(q)? {
        return Err(Error::NotInterior);
    }
    let delta = (q - p).norm();
    if delta < COINCIDENCE_TOL * body.circumradius() {
        return Ok(DistanceReport { distance: 0.0, chord: None, s: 0.5, t: 0.5, precision_warning: false });
    }
    let dir = (q - p) / delta;
    // a from p's extents, b from q's: both sides keep full precision
    let (back_p, _) = body.extents(p, &dir)?;
    let (_, ahead_q) = body.extents(q, &dir)?;
    if !(back_p > 0.0 && ahead_q > 0.0) {
        return Err(Error::NotInterior);
    }
    let len = back_p + delta + ahead_q;
    let s = back_p / len;
    let t = (back_p + delta) / len;
    let distance = 0.5 * ((delta / back_p).ln_1p() + (delta / ahead_q).ln_1p());
    let precision_warning = s < NEAR_BOUNDARY_TOL || ahead_q / len < NEAR_BOUNDARY_TOL;
    let chord = Chord::new(p - &dir * back_p, q + &dir * ahead_q)?;
    Ok(DistanceReport { distance, chord: Some(chord), s, t, precision_warning })
}

/// `d_C(p, q) = 1/2 ln [a, p, q, b]`, with `d_C(p, p) = 0`.
pub fn hilbert_distance(body: &ConvexBody, p: &Point, q: &Point) -> Result<f64> {
    Ok(distance_report(body, p, q)?.distance)
}

/// Hilbert distance between anchored points, computed from facet slacks
/// (or the quadratic defect for ellipsoids) in extended precision.
///
/// Agrees with [`hilbert_distance`] on ordinary points and stays exact for
/// points far out along geodesic rays, where coordinates round onto the
/// boundary.
pub fn anchored_distance(body: &ConvexBody, p: &AnchoredPoint, q: &AnchoredPoint) -> Result<f64> {
    match body.anchored_gaps(p, q)? {
        None => Ok(0.0),
        Some((back, ahead)) => Ok(0.5 * (gap_term(back) + gap_term(ahead))),
    }
}

/// `ln(1 + 1/g)`.
fn gap_term(g: ExtReal) -> f64 {
    (ExtReal::ONE / g).ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::*;

    fn pt(c: &[f64]) -> Point {
        Point::from_column_slice(c)
    }

    #[test]
    fn cross_ratio_examples() {
        let cr = cross_ratio(&pt(&[-1., 0.]), &pt(&[0., 0.]), &pt(&[0.5, 0.]), &pt(&[1., 0.])).unwrap();
        assert!((cr - 3.0).abs() < 1e-15);
        let cr = cross_ratio(&pt(&[-1., 0.]), &pt(&[0.3, 0.]), &pt(&[0.3, 0.]), &pt(&[1., 0.])).unwrap();
        assert!((cr - 1.0).abs() < 1e-15);
        let cr = cross_ratio(&pt(&[0., 0.]), &pt(&[1., 0.]), &pt(&[2., 0.]), &pt(&[4., 0.])).unwrap();
        assert!((cr - 3.0).abs() < 1e-15);
    }

    #[test]
    fn cross_ratio_errors() {
        let r = cross_ratio(&pt(&[0., 0.]), &pt(&[1., 0.1]), &pt(&[2., 0.]), &pt(&[4., 0.]));
        assert!(matches!(r, Err(Error::NonCollinear)));
        let r = cross_ratio(&pt(&[0., 0.]), &pt(&[2., 0.]), &pt(&[1., 0.]), &pt(&[4., 0.]));
        assert!(matches!(r, Err(Error::OrderViolated { .. })));
    }

    #[test]
    fn distance_examples() {
        let half_ln3 = 0.5 * 3f64.ln();
        let z = pt(&[0., 0.]);
        let q = pt(&[0.5, 0.]);
        assert_eq!(hilbert_distance(&square(), &z, &z).unwrap(), 0.0);
        assert!((hilbert_distance(&unit_disk(), &z, &q).unwrap() - half_ln3).abs() < 1e-15);
        assert!((hilbert_distance(&square(), &z, &q).unwrap() - half_ln3).abs() < 1e-15);
        assert!((0.5f64.atanh() - half_ln3).abs() < 1e-15);
    }

    #[test]
    fn distance_report_matches_cross_ratio() {
        let body = regular_polygon(5, 1.0).unwrap();
        let p = pt(&[0.1, 0.2]);
        let q = pt(&[-0.3, 0.25]);
        let r = distance_report(&body, &p, &q).unwrap();
        let c = r.chord.unwrap();
        let cr = cross_ratio(&c.a, &p, &q, &c.b).unwrap();
        assert!((0.5 * cr.ln() - r.distance).abs() < 1e-13);
        assert!(body.on_boundary(&c.a).unwrap() && body.on_boundary(&c.b).unwrap());
        assert!(!r.precision_warning);
    }

    #[test]
    fn distance_needs_interior_points() {
        let r = hilbert_distance(&square(), &pt(&[0., 0.]), &pt(&[2., 0.]));
        assert!(matches!(r, Err(Error::NotInterior)));
    }

    #[test]
    fn near_boundary_points_raise_the_warning() {
        let body = square().with_tolerance(1e-15).unwrap();
        let r = distance_report(&body, &pt(&[0., 0.]), &pt(&[1.0 - 1e-13, 0.])).unwrap();
        assert!(r.precision_warning);
        assert!(r.distance.is_finite());
    }

    #[test]
    fn anchored_route_matches_chord_route() {
        let bodies = vec![square(), unit_disk(), ellipse(2.0, 0.5, 0.4).unwrap(), regular_polygon(6, 1.0).unwrap()];
        let pairs = [([0.1, 0.2], [-0.3, 0.25]), ([0.0, 0.0], [0.4, -0.1]), ([0.2, 0.1], [0.2, 0.11])];
        for body in &bodies {
            for (p, q) in pairs {
                let (p, q) = (pt(&p), pt(&q));
                let a = hilbert_distance(body, &p, &q).unwrap();
                let b = anchored_distance(body, &AnchoredPoint::plain(p), &AnchoredPoint::plain(q)).unwrap();
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }
}
