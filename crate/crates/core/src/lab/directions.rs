use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AnchoredPoint;
use crate::lab::kn_estimate;
use crate::metric::GeodesicRay;
use crate::norms::NormedMap;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionPair {
    pub i: usize,
    pub j: usize,
    /// Defect bound of the ray pair over the same schedule.
    pub k_hat: f64,
}

/// Normalized images `v_k(n) = (f(c_k(n)) - f(c(0))) / n` at one time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionRow {
    pub n: f64,
    pub vectors: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    /// `A + B / n`.
    pub norm_bound: f64,
    /// `||v_i - v_j||`, in the order of [`DirectionsTable::pairs`].
    pub distances: Vec<f64>,
    /// `2 / A - (K_ij / A + B) / n`.
    pub lower_bounds: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionsTable {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub base: Vec<f64>,
    pub targets: Vec<Vec<f64>>,
    pub pairs: Vec<DirectionPair>,
    pub rows: Vec<DirectionRow>,
    /// First scheduled `n` from which every pair bound is positive, so the
    /// images are forced apart; `None` if that never happens on the schedule.
    pub bound_active_from: Option<f64>,
}

impl DirectionsTable {
    /// Largest excess of a norm over its bound (nonpositive when all hold).
    pub fn norm_excess(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.norms.iter().map(move |v| v - r.norm_bound))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest shortfall of a pair distance below its bound.
    pub fn separation_shortfall(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.distances.iter().zip(&r.lower_bounds).map(|(d, l)| l - d))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Tabulates the normalized images of geodesic rays from a common base
/// under a map with constants `(A, B)`.
pub fn asymptotic_directions(
    map: &dyn NormedMap,
    rays: &[GeodesicRay],
    schedule: &[f64],
    a: f64,
    b: f64,
) -> Result<DirectionsTable> {
    let first = rays.first().ok_or_else(|| Error::InvalidInput("at least one ray is required".into()))?;
    if rays.iter().any(|r| r.base() != first.base()) {
        return Err(Error::InvalidInput("rays must share their base point".into()));
    }
    if !(a >= 1.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput("constants must satisfy A >= 1, B >= 0".into()));
    }
    let base = first.base().clone();
    let body = first.body();
    let mut pairs = Vec::new();
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            let k = kn_estimate(body, &base, rays[i].target(), rays[j].target(), schedule)?;
            pairs.push(DirectionPair { i, j, k_hat: k.k_hat });
        }
    }
    let f0 = map.image(&AnchoredPoint::plain(base.clone()))?;
    let norm = map.norm();
    let rows = schedule
        .par_iter()
        .map(|&n| {
            let vectors = rays
                .iter()
                .map(|r| Ok((map.image(&r.anchored(n)?)? - &f0) / n))
                .collect::<Result<Vec<_>>>()?;
            let norms = vectors.iter().map(|v| norm.eval(v)).collect::<Result<Vec<_>>>()?;
            let distances =
                pairs.iter().map(|p| norm.eval(&(&vectors[p.i] - &vectors[p.j]))).collect::<Result<Vec<_>>>()?;
            let lower_bounds = pairs.iter().map(|p| 2.0 / a - (p.k_hat / a + b) / n).collect();
            Ok(DirectionRow {
                n,
                vectors: vectors.iter().map(|v| v.iter().copied().collect()).collect(),
                norms,
                norm_bound: a + b / n,
                distances,
                lower_bounds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let positive = |r: &DirectionRow| r.lower_bounds.iter().all(|l| *l > 0.0);
    let bound_active_from = rows
        .iter()
        .enumerate()
        .find(|(i, _)| rows[*i..].iter().all(positive))
        .map(|(_, r)| r.n);
    Ok(DirectionsTable {
        a,
        b,
        base: base.iter().copied().collect(),
        targets: rays.iter().map(|r| r.target().iter().copied().collect()).collect(),
        pairs,
        rows,
        bound_active_from,
    })
}
