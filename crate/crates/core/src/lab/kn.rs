use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AnchoredPoint, Classification, ConvexBody, Point};
use crate::lab::midpoint_on_boundary;
use crate::metric::{anchored_distance, GeodesicRay};

/// Schedule points inspected by the stabilization test.
pub const STABILIZATION_WINDOW: usize = 10;
/// Largest spread of the defect over the window for a stabilized curve.
pub const STABILIZATION_TOL: f64 = 1e-3;
/// Geometric and linear schedules disagreeing by more than this are flagged.
pub const SCHEDULE_AGREEMENT_TOL: f64 = 1e-2;
/// Points of the comparison schedule.
pub const LINEAR_POINTS: usize = 64;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DefectPoint {
    pub t: f64,
    pub to_x: f64,
    pub to_y: f64,
    pub between: f64,
    /// `d(x_n, p0) + d(y_n, p0) - d(x_n, y_n)`.
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stabilization {
    /// Spread of the defect over the last `window` schedule points.
    pub delta: f64,
    pub window: usize,
    pub stabilized: bool,
    /// First schedule index of the window.
    pub start: usize,
}

/// Empirical Gromov-product bound along the rays from `p0` toward `x` and `y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KnEstimate {
    pub p0: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `[x, y]` lies in the boundary; the defect is then unbounded.
    pub segment_in_boundary: bool,
    pub curve: Vec<DefectPoint>,
    /// Supremum of the defect over the schedule (an estimate of K).
    pub k_hat: f64,
    pub stabilization: Stabilization,
    /// Same supremum over an evenly spaced schedule with the same range.
    pub k_hat_linear: f64,
    pub schedules_disagree: bool,
}

impl KnEstimate {
    pub fn defects(&self) -> impl Iterator<Item = f64> + '_ {
        self.curve.iter().map(|c| c.defect)
    }
}

/// `{1, 2, 4, ..., 2^k}`.
pub fn geometric_schedule(k: u32) -> Vec<f64> {
    (0..=k).map(|i| 2f64.powi(i as i32)).collect()
}

/// `n` evenly spaced times from `lo` to `hi`.
pub fn linear_schedule(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![hi];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidInput("empty schedule".into()));
    }
    if schedule.iter().any(|t| !(t.is_finite() && *t > 0.0)) || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("schedule must be positive and strictly increasing".into()));
    }
    Ok(())
}

fn curve(rx: &GeodesicRay, ry: &GeodesicRay, p0: &AnchoredPoint, schedule: &[f64]) -> Result<Vec<DefectPoint>> {
    let body = rx.body();
    schedule
        .par_iter()
        .map(|&t| {
            let xn = rx.anchored(t)?;
            let yn = ry.anchored(t)?;
            let to_x = anchored_distance(body, p0, &xn)?;
            let to_y = anchored_distance(body, p0, &yn)?;
            let between = anchored_distance(body, &xn, &yn)?;
            Ok(DefectPoint { t, to_x, to_y, between, defect: to_x + to_y - between })
        })
        .collect()
}

fn sup(points: &[DefectPoint]) -> f64 {
    points.iter().map(|c| c.defect).fold(f64::NEG_INFINITY, f64::max)
}

pub fn kn_estimate(body: &ConvexBody, p0: &Point, x: &Point, y: &Point, schedule: &[f64]) -> Result<KnEstimate> {
    check_schedule(schedule)?;
    if !body.is_interior(p0)? {
        return Err(Error::NotInterior);
    }
    for b in [x, y] {
        if body.contains(b)? != Classification::Boundary {
            return Err(Error::NotOnBoundary);
        }
    }
    let rx = GeodesicRay::new(body, p0, x)?;
    let ry = GeodesicRay::new(body, p0, y)?;
    let base = AnchoredPoint::plain(p0.clone());
    let points = curve(&rx, &ry, &base, schedule)?;
    let k_hat = sup(&points);

    let start = points.len().saturating_sub(STABILIZATION_WINDOW);
    let tail = &points[start..];
    let hi = tail.iter().map(|c| c.defect).fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().map(|c| c.defect).fold(f64::INFINITY, f64::min);
    let delta = hi - lo;
    let stabilization = Stabilization {
        delta,
        window: tail.len(),
        stabilized: delta < STABILIZATION_TOL,
        start,
    };

    let lin = linear_schedule(schedule[0], schedule[schedule.len() - 1], LINEAR_POINTS);
    let k_hat_linear = sup(&curve(&rx, &ry, &base, &lin)?);
    Ok(KnEstimate {
        p0: p0.iter().copied().collect(),
        x: x.iter().copied().collect(),
        y: y.iter().copied().collect(),
        segment_in_boundary: midpoint_on_boundary(body, x, y),
        curve: points,
        k_hat,
        stabilization,
        k_hat_linear,
        schedules_disagree: (k_hat - k_hat_linear).abs() > SCHEDULE_AGREEMENT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::*;

    fn pt(c: &[f64]) -> Point {
        Point::from_column_slice(c)
    }

    #[test]
    fn adjacent_edges_match_the_closed_form() {
        // defect(t) = ln 2 - ln(1 + e^{-2t}) for the axis rays of the square
        let sched = linear_schedule(1.0, 15.0, 15);
        let k = kn_estimate(&square(), &pt(&[0., 0.]), &pt(&[1., 0.]), &pt(&[0., 1.]), &sched).unwrap();
        for c in &k.curve {
            let expect = 2f64.ln() - (-2.0 * c.t).exp().ln_1p();
            assert!((c.defect - expect).abs() < 1e-9, "t = {}: {} vs {expect}", c.t, c.defect);
        }
        assert!(k.stabilization.stabilized);
        assert!(!k.segment_in_boundary);
        assert!(!k.schedules_disagree);
    }

    #[test]
    fn same_edge_diverges() {
        let sched = linear_schedule(1.0, 15.0, 15);
        let sq = square();
        let adj = kn_estimate(&sq, &pt(&[0., 0.]), &pt(&[1., 0.]), &pt(&[0., 1.]), &sched).unwrap();
        let same = kn_estimate(&sq, &pt(&[0., 0.]), &pt(&[1. / 3., 1.]), &pt(&[2. / 3., 1.]), &sched).unwrap();
        assert!(same.segment_in_boundary);
        assert!(same.curve.last().unwrap().defect > adj.k_hat + 5.0);
        assert!(same.defects().all(|d| d >= -1e-9));
    }

    #[test]
    fn schedule_and_point_errors() {
        let sq = square();
        let (o, x, y) = (pt(&[0., 0.]), pt(&[1., 0.]), pt(&[0., 1.]));
        assert!(kn_estimate(&sq, &o, &x, &y, &[2.0, 1.0]).is_err());
        assert!(kn_estimate(&sq, &o, &x, &y, &[]).is_err());
        assert!(matches!(kn_estimate(&sq, &o, &pt(&[0.5, 0.]), &y, &[1.0]), Err(Error::NotOnBoundary)));
        assert!(matches!(kn_estimate(&sq, &pt(&[2., 0.]), &x, &y, &[1.0]), Err(Error::NotInterior)));
    }
}
