use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{AnchoredPoint, Point};

/// `{x : (x - c)^T S (x - c) < 1}` for symmetric positive-definite `S`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    center: Point,
    shape: DMatrix<f64>,
    radius: f64,
}

impl Ellipsoid {
    pub fn new(center: Point, shape: DMatrix<f64>) -> Result<Ellipsoid> {
        let m = center.len();
        if m == 0 {
            return Err(Error::InvalidInput("zero-dimensional ellipsoid".into()));
        }
        if shape.nrows() != m || shape.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: shape.nrows() });
        }
        if center.iter().chain(shape.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite ellipsoid data".into()));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(Error::InvalidInput("ellipsoid shape matrix must be symmetric".into()));
        }
        let eig = shape.clone().symmetric_eigen();
        let lo = eig.eigenvalues.min();
        if lo <= 0.0 {
            return Err(Error::Degenerate("ellipsoid shape matrix must be positive definite".into()));
        }
        Ok(Ellipsoid { center, shape, radius: 1.0 / lo.sqrt() })
    }

    /// Euclidean ball.
    pub fn ball(center: Point, radius: f64) -> Result<Ellipsoid> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("ball radius must be positive".into()));
        }
        let m = center.len();
        Ellipsoid::new(center, DMatrix::identity(m, m) / (radius * radius))
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    /// Largest semi-axis.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn quad(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.shape * v))
    }

    /// Signed displacement to the boundary along the ray from the center,
    /// normalized by the largest semi-axis.
    pub(crate) fn level(&self, x: &Point) -> f64 {
        let y = x - &self.center;
        let q = self.quad(&y, &y).sqrt();
        if q == 0.0 {
            return -1.0;
        }
        (q - 1.0) * y.norm() / q / self.radius
    }

    pub(crate) fn extents(&self, p: &Point, dir: &DVector<f64>) -> Result<(f64, f64)> {
        let y = p - &self.center;
        let a = self.quad(dir, dir);
        if a == 0.0 {
            return Err(Error::Degenerate("zero direction".into()));
        }
        let b = self.quad(&y, dir);
        let c0 = (self.quad(&y, &y) - 1.0).min(0.0);
        let r = (b * b - a * c0).sqrt();
        let ahead = if b <= 0.0 { (r - b) / a } else { -c0 / (b + r) };
        let back = if b >= 0.0 { (b + r) / a } else { -c0 / (r - b) };
        Ok((back, ahead))
    }

    /// `1 - (x - c)^T S (x - c)` at an anchored point.
    fn deficit(&self, p: &AnchoredPoint, snap: f64) -> ExtReal {
        let y = &p.anchor - &self.center;
        let mut g = self.quad(&y, &y) - 1.0;
        if p.anchor_on_boundary && g.abs() <= snap {
            g = 0.0;
        }
        let lin = 2.0 * self.quad(&y, &p.offset);
        let sq = self.quad(&p.offset, &p.offset);
        -(ExtReal::from(g) + p.scale * lin + p.scale * p.scale * sq)
    }

    pub(crate) fn anchored_gaps(
        &self,
        p: &AnchoredPoint,
        q: &AnchoredPoint,
        snap: f64,
    ) -> Result<Option<(ExtReal, ExtReal)>> {
        let phi_p = self.deficit(p, snap);
        let phi_q = self.deficit(q, snap);
        if !phi_p.is_positive() || !phi_q.is_positive() {
            return Err(Error::NotInterior);
        }
        let d = q.difference(p);
        if d.iter().all(|x| *x == 0.0) {
            return Ok(None);
        }
        let a = self.quad(&d, &d);
        let bp = self.quad(&(p.position() - &self.center), &d);
        let bq = self.quad(&(q.position() - &self.center), &d);
        // behind p: a l^2 - 2 bp l - phi_p = 0
        let rp = (bp * bp + a * phi_p.to_f64()).sqrt();
        let back = if bp >= 0.0 {
            ExtReal::from((bp + rp) / a)
        } else {
            phi_p / ExtReal::from(rp - bp)
        };
        // ahead of q: a m^2 + 2 bq m - phi_q = 0
        let rq = (bq * bq + a * phi_q.to_f64()).sqrt();
        let ahead = if bq <= 0.0 {
            ExtReal::from((rq - bq) / a)
        } else {
            phi_q / ExtReal::from(rq + bq)
        };
        Ok(Some((back, ahead)))
    }
}
