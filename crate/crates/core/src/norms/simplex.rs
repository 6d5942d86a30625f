use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{AnchoredPoint, ConvexBody, Point, DEFAULT_MEMBERSHIP_TOL};
use crate::norms::{Norm, NormedMap};

/// Barycentric chart of an `m`-simplex, with the isometry of its Hilbert
/// metric onto `(R^{m+1} / diagonal, variation norm)`.
#[derive(Clone, Debug)]
pub struct SimplexChart {
    vertices: Vec<Point>,
    /// Inverse of the `(m+1) x (m+1)` matrix with columns `[v_i; 1]`.
    inverse: DMatrix<f64>,
    body: ConvexBody,
    norm: Norm,
    tol: f64,
}

impl SimplexChart {
    pub fn new(vertices: Vec<Point>) -> Result<SimplexChart> {
        let n = vertices.len();
        if n < 2 {
            return Err(Error::InvalidInput("a simplex needs at least two vertices".into()));
        }
        let m = n - 1;
        if vertices.iter().any(|v| v.len() != m) {
            return Err(Error::InvalidInput(format!("an {m}-simplex needs {n} vertices in R^{m}")));
        }
        let mut mat = DMatrix::zeros(n, n);
        for (j, v) in vertices.iter().enumerate() {
            mat.view_mut((0, j), (m, 1)).copy_from(v);
            mat[(m, j)] = 1.0;
        }
        let sv = mat.clone().singular_values();
        if sv.min() <= 1e-12 * sv.max() {
            return Err(Error::Degenerate("simplex vertices are affinely dependent".into()));
        }
        let inverse = mat.try_inverse().ok_or_else(|| Error::Degenerate("singular simplex".into()))?;
        let body = ConvexBody::polytope_v(vertices.clone())?;
        Ok(SimplexChart { vertices, inverse, body, norm: Norm::variation(m)?, tol: DEFAULT_MEMBERSHIP_TOL })
    }

    pub fn standard(m: usize) -> Result<SimplexChart> {
        SimplexChart::new(crate::geometry::shapes::standard_simplex_vertices(m))
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn barycentric(&self, p: &Point) -> Result<DVector<f64>> {
        let m = self.dim();
        if p.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: p.len() });
        }
        let aug = DVector::from_iterator(m + 1, p.iter().copied().chain(std::iter::once(1.0)));
        Ok(&self.inverse * aug)
    }

    fn linear_barycentric(&self, v: &DVector<f64>) -> DVector<f64> {
        let m = self.dim();
        let aug = DVector::from_iterator(m + 1, v.iter().copied().chain(std::iter::once(0.0)));
        &self.inverse * aug
    }

    /// Barycentric coordinates of an anchored point in extended range.
    /// Coordinates of a boundary anchor within the tolerance of zero are
    /// taken to be exactly zero.
    pub fn barycentric_anchored(&self, p: &AnchoredPoint) -> Result<Vec<ExtReal>> {
        let base = self.barycentric(&p.anchor)?;
        let lin = self.linear_barycentric(&p.offset);
        Ok(base
            .iter()
            .zip(lin.iter())
            .map(|(&b, &l)| {
                let b = if p.anchor_on_boundary && b.abs() <= self.tol { 0.0 } else { b };
                ExtReal::from(b) + p.scale * l
            })
            .collect())
    }

    /// `F(p) = (1/2) ln lambda(p)`, shifted to mean zero.
    pub fn isometry(&self, p: &Point) -> Result<DVector<f64>> {
        let lambda = self.barycentric(p)?;
        if lambda.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotInterior);
        }
        Ok(centered(lambda.iter().map(|l| 0.5 * l.ln())))
    }

    /// [`isometry`](Self::isometry) evaluated without rounding the point to `f64`.
    pub fn isometry_anchored(&self, p: &AnchoredPoint) -> Result<DVector<f64>> {
        let lambda = self.barycentric_anchored(p)?;
        if lambda.iter().any(|l| !l.is_positive()) {
            return Err(Error::NotInterior);
        }
        Ok(centered(lambda.iter().map(|l| 0.5 * l.ln())))
    }
}

fn centered(values: impl Iterator<Item = f64>) -> DVector<f64> {
    let v: Vec<f64> = values.collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    DVector::from_iterator(v.len(), v.into_iter().map(|x| x - mean))
}

impl NormedMap for SimplexChart {
    fn norm(&self) -> &Norm {
        &self.norm
    }

    fn image(&self, p: &AnchoredPoint) -> Result<DVector<f64>> {
        self.isometry_anchored(p)
    }
}
