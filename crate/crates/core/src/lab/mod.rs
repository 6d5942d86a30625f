//! Executable versions of the proof machinery: visibility sets, Gromov
//! product defects along geodesic rays, quasi-isometry fits, asymptotic
//! directions, arc decomposition and plane-section verdicts.

mod arcs;
mod directions;
mod kn;
mod qi;
mod sections;
pub mod suite;
mod visibility;

use nalgebra::DVector;

pub use arcs::{arc_decompose, Arc, ArcDecomposition, PolygonVerdict, Segment};
pub use directions::{asymptotic_directions, DirectionPair, DirectionRow, DirectionsTable};
pub use kn::{geometric_schedule, kn_estimate, linear_schedule, DefectPoint, KnEstimate, Stabilization};
pub use qi::{qi_fit, qi_fit_map, QiFit};
pub use sections::{polytope_verdict, SectionBudget, SectionReport, SectionsVerdict};
pub use visibility::{exhaustive_visibility, max_visibility_set, VisibilitySet};

use crate::error::{Error, Result};
use crate::geometry::{Classification, ConvexBody, Point};

/// Interior probes per segment or arc.
pub const PROBES: usize = 32;

fn require_planar_origin(body: &ConvexBody) -> Result<()> {
    if body.dim() != 2 {
        return Err(Error::InvalidInput(format!("expected a 2-D body, got dimension {}", body.dim())));
    }
    if !body.is_interior(&Point::zeros(2))? {
        return Err(Error::NotInterior);
    }
    Ok(())
}

/// `pi(theta)`: where the half-line from 0 at angle `theta` leaves the body.
pub fn boundary_param(body: &ConvexBody, theta: f64) -> Result<Point> {
    require_planar_origin(body)?;
    Ok(radial(body, theta))
}

/// [`boundary_param`] without the checks.
fn radial(body: &ConvexBody, theta: f64) -> Point {
    let dir = DVector::from_vec(vec![theta.cos(), theta.sin()]);
    let (_, r) = body.extents(&Point::zeros(2), &dir).expect("planar body with interior origin");
    dir * r
}

/// `[x, y]` lies in the boundary, decided by the midpoint.
pub fn segment_in_boundary(body: &ConvexBody, x: &Point, y: &Point) -> Result<bool> {
    for p in [x, y] {
        if body.contains(p)? != Classification::Boundary {
            return Err(Error::NotOnBoundary);
        }
    }
    Ok(midpoint_on_boundary(body, x, y))
}

fn midpoint_on_boundary(body: &ConvexBody, x: &Point, y: &Point) -> bool {
    let mid = (x + y) * 0.5;
    body.contains(&mid).map(|c| c == Classification::Boundary).unwrap_or(false)
}

/// All `PROBES` interior points of `[a, b]` classify as boundary.
fn probes_on_boundary(body: &ConvexBody, a: &Point, b: &Point) -> bool {
    (1..=PROBES).all(|j| {
        let u = j as f64 / (PROBES + 1) as f64;
        let p = a * (1.0 - u) + b * u;
        matches!(body.contains(&p), Ok(Classification::Boundary))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn pt(c: &[f64]) -> Point {
        Point::from_column_slice(c)
    }

    #[test]
    fn boundary_param_examples() {
        let p = boundary_param(&unit_disk(), 0.7).unwrap();
        assert!((p - pt(&[0.7f64.cos(), 0.7f64.sin()])).norm() < 1e-15);
        assert!((boundary_param(&square(), 0.0).unwrap() - pt(&[1., 0.])).norm() < 1e-15);
        assert!((boundary_param(&square(), FRAC_PI_4).unwrap() - pt(&[1., 1.])).norm() < 1e-15);
        let a = boundary_param(&square(), 0.3).unwrap();
        let b = boundary_param(&square(), 0.3 + 2.0 * PI).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn boundary_param_needs_interior_origin() {
        let shifted = ConvexBody::polytope_v(vec![pt(&[1., 1.]), pt(&[2., 1.]), pt(&[1., 2.])]).unwrap();
        assert!(matches!(boundary_param(&shifted, 0.0), Err(Error::NotInterior)));
    }

    #[test]
    fn segment_in_boundary_examples() {
        let sq = square();
        assert!(segment_in_boundary(&sq, &pt(&[0., 1.]), &pt(&[0.5, 1.])).unwrap());
        assert!(!segment_in_boundary(&sq, &pt(&[1., 0.]), &pt(&[0., 1.])).unwrap());
        assert!(matches!(segment_in_boundary(&sq, &pt(&[0., 0.]), &pt(&[0., 1.])), Err(Error::NotOnBoundary)));
        let e = ellipse(2.0, 0.7, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = boundary_param(&e, rng.random_range(0.0..6.3)).unwrap();
            let b = boundary_param(&e, rng.random_range(0.0..6.3)).unwrap();
            if (&a - &b).norm() > 1e-3 {
                assert!(!segment_in_boundary(&e, &a, &b).unwrap());
            }
        }
    }
}
