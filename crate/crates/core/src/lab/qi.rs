use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AnchoredPoint, ConvexBody, Point};
use crate::metric::hilbert_distance;
use crate::norms::{Norm, NormedMap};

/// Fitted quasi-isometry constants `(A, B)` for sampled pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QiFit {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub pairs: usize,
    /// Hilbert distances of the sample pairs.
    pub distances: Vec<f64>,
    /// Norm distances of their images.
    pub image_distances: Vec<f64>,
    /// `max |image - distance|`.
    pub max_residual: f64,
    /// Smallest slack of `d / A - B <= e` over the pairs.
    pub lower_slack: f64,
    /// Smallest slack of `e <= A d + B` over the pairs.
    pub upper_slack: f64,
}

/// `B(A)`: the least `B >= 0` making `A` feasible.
fn b_of(a: f64, d: &[f64], e: &[f64]) -> f64 {
    d.iter().zip(e).fold(0.0, |m, (&d, &e)| m.max(d / a - e).max(e - a * d))
}

/// Smallest `B`, then the smallest `A >= 1` attaining it.
///
/// `B(A)` is nonincreasing, so the optimal `B` is its limit at infinity:
/// the largest image distance of a pair at Hilbert distance zero. `A` is
/// then found by bisection on `B(A) <= B*`.
fn fit(d: &[f64], e: &[f64]) -> Result<(f64, f64)> {
    let b_star = d.iter().zip(e).filter(|(d, _)| **d == 0.0).fold(0.0, |m: f64, (_, &e)| m.max(e));
    let target = |a: f64| b_of(a, d, e) <= b_star * (1.0 + 1e-15) + 1e-15;
    if target(1.0) {
        return Ok((1.0, b_of(1.0, d, e)));
    }
    let mut hi = 2.0;
    while !target(hi) {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(Error::NonConvergence("image collapses distinct points; no finite A attains the least B".into()));
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if target(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, b_of(hi, d, e)))
}

/// Fits `(A, B)` to pairs `(p, q, d_C(p, q))` and their images.
pub fn qi_fit(pairs: &[(Point, Point, f64)], images: &[(DVector<f64>, DVector<f64>)], norm: &Norm) -> Result<QiFit> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("qi_fit needs at least one pair".into()));
    }
    if pairs.len() != images.len() {
        return Err(Error::InvalidInput("pairs and images differ in length".into()));
    }
    let d: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    if d.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput("distances must be finite and nonnegative".into()));
    }
    let e = images.iter().map(|(f, g)| norm.eval(&(f - g))).collect::<Result<Vec<f64>>>()?;
    let (a, b) = fit(&d, &e)?;
    let max_residual = d.iter().zip(&e).fold(0.0, |m: f64, (d, e)| m.max((e - d).abs()));
    let lower_slack = d.iter().zip(&e).fold(f64::INFINITY, |m, (&d, &e)| m.min(e - (d / a - b)));
    let upper_slack = d.iter().zip(&e).fold(f64::INFINITY, |m, (&d, &e)| m.min(a * d + b - e));
    Ok(QiFit { a, b, pairs: d.len(), distances: d, image_distances: e, max_residual, lower_slack, upper_slack })
}

/// [`qi_fit`] for a map on the body, with distances from the chord oracle.
pub fn qi_fit_map(body: &ConvexBody, map: &dyn NormedMap, pairs: &[(Point, Point)]) -> Result<QiFit> {
    let mut with_d = Vec::with_capacity(pairs.len());
    let mut images = Vec::with_capacity(pairs.len());
    for (p, q) in pairs {
        with_d.push((p.clone(), q.clone(), hilbert_distance(body, p, q)?));
        images.push((map.image(&AnchoredPoint::plain(p.clone()))?, map.image(&AnchoredPoint::plain(q.clone()))?));
    }
    qi_fit(&with_d, &images, map.norm())
}
