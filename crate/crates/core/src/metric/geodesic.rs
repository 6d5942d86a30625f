use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{AnchoredPoint, Chord, Classification, ConvexBody, Point};

/// Unit-speed Hilbert geodesic from an interior base point toward a boundary
/// point, running along the chord through both.
#[derive(Clone, Debug)]
pub struct GeodesicRay {
    body: ConvexBody,
    base: Point,
    chord: Chord,
    s0: f64,
}

/// Serializable summary of a ray.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RaySummary {
    pub base: Vec<f64>,
    pub target: Vec<f64>,
    pub chord: Chord,
    pub s0: f64,
}

impl GeodesicRay {
    pub fn new(body: &ConvexBody, base: &Point, target: &Point) -> Result<GeodesicRay> {
        if !body.is_interior(base)? {
            return Err(Error::NotInterior);
        }
        if body.contains(target)? != Classification::Boundary {
            return Err(Error::NotOnBoundary);
        }
        let dir = target - base;
        if dir.norm() == 0.0 {
            return Err(Error::InvalidInput("target equals base".into()));
        }
        GeodesicRay::toward(body, base, &dir)
    }

    /// Ray leaving `base` in direction `dir`; the target is where it exits.
    pub fn toward(body: &ConvexBody, base: &Point, dir: &DVector<f64>) -> Result<GeodesicRay> {
        let chord = body.chord(base, dir)?;
        let back = (base - &chord.a).norm();
        let ahead = (&chord.b - base).norm();
        let s0 = back / (back + ahead);
        Ok(GeodesicRay { body: body.clone(), base: base.clone(), chord, s0 })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    /// Boundary endpoint the ray converges to.
    pub fn target(&self) -> &Point {
        &self.chord.b
    }

    pub fn chord(&self) -> &Chord {
        &self.chord
    }

    /// Chord parameter of the base point.
    pub fn s0(&self) -> f64 {
        self.s0
    }

    /// `(1 - u(t)) / (1 - s0)`: how much of the base-to-target offset remains at time `t`.
    fn remaining(&self, t: f64) -> ExtReal {
        let kappa = ExtReal::from(self.s0 / (1.0 - self.s0));
        let one_minus_u = ExtReal::ONE / (ExtReal::ONE + ExtReal::exp(2.0 * t) * kappa);
        one_minus_u / ExtReal::from(1.0 - self.s0)
    }

    fn check_time(t: f64) -> Result<()> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("geodesic time must be finite and >= 0, got {t}")));
        }
        Ok(())
    }

    /// Chord parameter `u` with `u / (1 - u) = e^{2t} s0 / (1 - s0)`.
    pub fn param(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(1.0 - (self.remaining(t) * (1.0 - self.s0)).to_f64())
    }

    /// `c(t)` in `f64` coordinates. Past `t ~ 18` the point is within
    /// rounding of the boundary; use [`anchored`](Self::anchored) there.
    pub fn eval(&self, t: f64) -> Result<Point> {
        Ok(self.anchored(t)?.position())
    }

    /// `c(t) = target + w(t) (base - target)` with `w` in extended range.
    pub fn anchored(&self, t: f64) -> Result<AnchoredPoint> {
        Self::check_time(t)?;
        Ok(AnchoredPoint {
            anchor: self.chord.b.clone(),
            offset: &self.base - &self.chord.b,
            scale: self.remaining(t),
            anchor_on_boundary: true,
        })
    }

    pub fn summary(&self) -> RaySummary {
        RaySummary {
            base: self.base.iter().copied().collect(),
            target: self.chord.b.iter().copied().collect(),
            chord: self.chord.clone(),
            s0: self.s0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::*;
    use crate::metric::{anchored_distance, hilbert_distance};

    fn pt(c: &[f64]) -> Point {
        Point::from_column_slice(c)
    }

    #[test]
    fn ray_examples() {
        let ray = GeodesicRay::new(&square(), &pt(&[0., 0.]), &pt(&[1., 0.])).unwrap();
        assert_eq!(ray.eval(0.0).unwrap(), pt(&[0., 0.]));
        let half = ray.eval(0.5 * 3f64.ln()).unwrap();
        assert!((half - pt(&[0.5, 0.])).norm() < 1e-15);
        assert!((ray.param(40.0).unwrap() - 1.0).abs() < 1e-16);
        assert!((ray.eval(40.0).unwrap() - pt(&[1., 0.])).norm() < 1e-15);
    }

    #[test]
    fn ray_preconditions() {
        let sq = square();
        assert!(matches!(GeodesicRay::new(&sq, &pt(&[0., 0.]), &pt(&[0.5, 0.])), Err(Error::NotOnBoundary)));
        assert!(matches!(GeodesicRay::new(&sq, &pt(&[1., 0.]), &pt(&[1., 0.])), Err(Error::NotInterior)));
        let ray = GeodesicRay::new(&sq, &pt(&[0., 0.]), &pt(&[1., 0.])).unwrap();
        assert!(ray.eval(-1.0).is_err());
    }

    #[test]
    fn unit_speed_on_both_routes() {
        let body = ellipse(1.5, 0.7, 0.3).unwrap();
        let base = pt(&[0.2, -0.1]);
        let ray = GeodesicRay::toward(&body, &base, &pt(&[0.3, 1.0])).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let d = hilbert_distance(&body, &base, &ray.eval(t).unwrap()).unwrap();
            assert!((d - t).abs() < 1e-9, "t={t}: {d}");
        }
        for t in [0.1, 1.0, 5.0, 20.0, 300.0, 16384.0] {
            let d = anchored_distance(&body, &AnchoredPoint::plain(base.clone()), &ray.anchored(t).unwrap()).unwrap();
            assert!((d - t).abs() < 1e-9 * t.max(1.0), "t={t}: {d}");
        }
    }
}
