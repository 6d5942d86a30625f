use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// `x -> L x + shift` with invertible `L`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    shift: DVector<f64>,
    inverse: DMatrix<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, shift: DVector<f64>) -> Result<AffineMap> {
        let m = shift.len();
        if linear.nrows() != m || linear.ncols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: linear.nrows() });
        }
        if linear.iter().chain(shift.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite affine map".into()));
        }
        let scale = linear.amax();
        let sv = linear.clone().singular_values();
        if scale == 0.0 || sv.min() <= 1e-12 * sv.max() {
            return Err(Error::Degenerate("affine map has a singular linear part".into()));
        }
        let inverse = linear
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("affine map has a singular linear part".into()))?;
        Ok(AffineMap { linear, shift, inverse })
    }

    pub fn translation(shift: DVector<f64>) -> AffineMap {
        let m = shift.len();
        let id = DMatrix::identity(m, m);
        AffineMap { linear: id.clone(), shift, inverse: id }
    }

    pub fn scaling(m: usize, factor: f64) -> Result<AffineMap> {
        AffineMap::new(DMatrix::identity(m, m) * factor, DVector::zeros(m))
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    pub fn apply(&self, x: &Point) -> Point {
        &self.linear * x + &self.shift
    }

    pub fn apply_linear(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.linear * v
    }

    pub fn pull(&self, y: &Point) -> Point {
        &self.inverse * (y - &self.shift)
    }

    pub fn pull_linear(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.inverse * v
    }

    /// Spectral norm of the linear part.
    pub fn operator_norm(&self) -> f64 {
        self.linear.clone().singular_values().max()
    }

    /// `self` after `inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &inner.linear,
            shift: &self.linear * &inner.shift + &self.shift,
            inverse: &inner.inverse * &self.inverse,
        }
    }
}
