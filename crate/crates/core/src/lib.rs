//! Hilbert geometry of bounded convex domains.
//!
//! The crate computes the Hilbert distance on bounded open convex sets from
//! the cross-ratio of chord points, follows unit-speed geodesic rays toward
//! the boundary, and bundles the experiments around quasi-isometries to
//! normed spaces: Gromov-product defects, packing-number brackets,
//! visibility sets, the arc-decomposition polygon detector and plane-section
//! verdicts.
//!
//! ```
//! use hilbert_core::geometry::{shapes, Point};
//! use hilbert_core::metric::hilbert_distance;
//!
//! let square = shapes::square();
//! let d = hilbert_distance(&square, &Point::zeros(2), &Point::from_vec(vec![0.5, 0.0])).unwrap();
//! assert!((d - 0.5 * 3f64.ln()).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ext;
pub mod geometry;
pub mod lab;
pub mod metric;
pub mod norms;
pub mod report;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use geometry::{AnchoredPoint, Chord, Classification, ConvexBody, Point};
pub use metric::{GeodesicRay, hilbert_distance};
pub use norms::{Norm, PackingBounds, SimplexChart};
