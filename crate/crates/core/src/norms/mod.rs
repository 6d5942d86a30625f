//! Target normed spaces: norm oracles, packing-number brackets and the
//! simplex isometry.

mod norm;
mod packing;
mod simplex;

use nalgebra::DVector;

pub use norm::{Exponent, Norm, NormDescriptor};
pub use packing::{packing_bounds, verify_packing, volumetric_upper, PackingBounds, PackingBudget, PackingSource};
pub use simplex::SimplexChart;

use crate::error::Result;
use crate::geometry::AnchoredPoint;

/// A map from a convex body into a normed space, evaluated on anchored
/// points so that far-out rays keep their precision.
pub trait NormedMap: Sync {
    fn norm(&self) -> &Norm;
    fn image(&self, p: &AnchoredPoint) -> Result<DVector<f64>>;
}

/// `||v||`, checking the dimension.
pub fn norm_eval(norm: &Norm, v: &DVector<f64>) -> Result<f64> {
    norm.eval(v)
}
