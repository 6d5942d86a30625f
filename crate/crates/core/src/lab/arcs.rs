use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{serde_point, Classification, ConvexBody, Point};
use crate::lab::{probes_on_boundary, radial, require_planar_origin, PROBES};

/// Bisection stops once the bracket on the pivot angle is this narrow.
pub const ANGLE_TOL: f64 = 1e-9;
pub const MAX_BISECTIONS: usize = 60;
/// Pivots closer than this to an arc endpoint are merged with it.
pub const MERGE_DIST: f64 = 1e-6;
/// Sine of the turning angle below which a vertex candidate is dropped as collinear.
const COLLINEAR_SINE: f64 = 1e-7;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "serde_point")]
    pub a: Point,
    #[serde(with = "serde_point")]
    pub b: Point,
    pub in_boundary: bool,
}

/// One boundary arc between consecutive points of `Y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Arc {
    pub theta_start: f64,
    pub theta_end: f64,
    /// Largest angle up to which the arc from the start is a segment.
    pub alpha0: f64,
    #[serde(with = "serde_point")]
    pub pivot: Point,
    /// The pivot coincided with an endpoint.
    pub merged: bool,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PolygonVerdict {
    Polygon {
        #[serde(with = "serde_point::vec")]
        vertices: Vec<Point>,
    },
    NotPolygonal {
        failing_arc: usize,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArcDecomposition {
    /// `Y` sorted by angle, with the extra point when only one was given.
    #[serde(with = "serde_point::vec")]
    pub points: Vec<Point>,
    pub angles: Vec<f64>,
    pub arcs: Vec<Arc>,
    pub verdict: PolygonVerdict,
}

impl ArcDecomposition {
    pub fn is_polygon(&self) -> bool {
        matches!(self.verdict, PolygonVerdict::Polygon { .. })
    }

    pub fn vertices(&self) -> Option<&[Point]> {
        match &self.verdict {
            PolygonVerdict::Polygon { vertices } => Some(vertices),
            PolygonVerdict::NotPolygonal { .. } => None,
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = &Segment> {
        self.arcs.iter().flat_map(|a| a.segments.iter())
    }
}

fn angle_of(p: &Point) -> f64 {
    let t = p[1].atan2(p[0]);
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

fn cross(u: &Point, v: &Point) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// The boundary arc from `start` to `pi(theta)` is the straight segment,
/// judged on `PROBES` arc points.
fn arc_is_segment(body: &ConvexBody, start: &Point, theta_start: f64, theta: f64, tol: f64) -> bool {
    let end = radial(body, theta);
    let chord = &end - start;
    let len = chord.norm();
    if len <= tol {
        return true;
    }
    (1..=PROBES).all(|j| {
        let phi = theta_start + (theta - theta_start) * j as f64 / (PROBES + 1) as f64;
        let w = radial(body, phi) - start;
        cross(&chord, &w).abs() / len <= tol
    })
}

/// Corner estimate: the line through `xs` and an arc point before `lo`
/// meets the line through `xe` and an arc point after `hi`. Falls back to
/// `pi(lo)` when the lines do not meet close to it.
fn refine_pivot(body: &ConvexBody, (xs, ts): (&Point, f64), (xe, te): (&Point, f64), lo: f64, hi: f64) -> Point {
    let before = radial(body, lo);
    let p = radial(body, 0.5 * (ts + lo));
    let q = radial(body, 0.5 * (hi + te));
    let (u, v) = (&p - xs, xe - &q);
    let den = cross(&u, &v);
    if den.abs() <= 1e-12 * u.norm() * v.norm() {
        return before;
    }
    let s = cross(&(&q - xs), &v) / den;
    let hit = xs + u * s;
    if (&hit - &before).norm() < MERGE_DIST {
        hit
    } else {
        before
    }
}

fn segment(body: &ConvexBody, a: &Point, b: &Point) -> Option<Segment> {
    if (a - b).norm() <= MERGE_DIST * 1e-3 {
        return None;
    }
    Some(Segment { a: a.clone(), b: b.clone(), in_boundary: probes_on_boundary(body, a, b) })
}

/// Splits each boundary arc between consecutive points of `Y` into two
/// straight pieces meeting at a pivot, and reports a polygon when all the
/// pieces lie in the boundary.
pub fn arc_decompose(body: &ConvexBody, ys: &[Point]) -> Result<ArcDecomposition> {
    require_planar_origin(body)?;
    if ys.is_empty() {
        return Err(Error::InvalidInput("arc decomposition needs at least one point".into()));
    }
    for y in ys {
        if y.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: y.len() });
        }
        if body.contains(y)? != Classification::Boundary {
            return Err(Error::NotOnBoundary);
        }
    }
    let mut pts: Vec<(f64, Point)> = ys.iter().map(|y| (angle_of(y), y.clone())).collect();
    if pts.len() == 1 {
        let th = (pts[0].0 + PI) % TAU;
        pts.push((th, radial(body, th)));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[1].0 - w[0].0 <= 1e-12) {
        return Err(Error::InvalidInput("points of Y must have distinct angles".into()));
    }
    let tol = body.tolerance() * body.circumradius();
    let n = pts.len();
    let mut arcs = Vec::with_capacity(n);
    for k in 0..n {
        let (ts, xs) = (pts[k].0, &pts[k].1);
        let (te, xe) = if k + 1 < n { (pts[k + 1].0, &pts[k + 1].1) } else { (pts[0].0 + TAU, &pts[0].1) };
        let (alpha0, hi) = if arc_is_segment(body, xs, ts, te, tol) {
            (te, te)
        } else {
            let (mut lo, mut hi) = (ts, te);
            for _ in 0..MAX_BISECTIONS {
                if hi - lo <= ANGLE_TOL {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if arc_is_segment(body, xs, ts, mid, tol) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        };
        let mut pivot = if alpha0 == te { xe.clone() } else { refine_pivot(body, (xs, ts), (xe, te), alpha0, hi) };
        let mut merged = false;
        if (&pivot - xs).norm() < MERGE_DIST {
            pivot = xs.clone();
            merged = true;
        } else if (&pivot - xe).norm() < MERGE_DIST {
            pivot = xe.clone();
            merged = true;
        }
        let segments = [segment(body, xs, &pivot), segment(body, &pivot, xe)].into_iter().flatten().collect();
        arcs.push(Arc { theta_start: ts, theta_end: te, alpha0, pivot, merged, segments });
    }

    let failing = arcs.iter().position(|a| a.segments.iter().any(|s| !s.in_boundary));
    let verdict = match failing {
        Some(k) => PolygonVerdict::NotPolygonal { failing_arc: k },
        None => PolygonVerdict::Polygon { vertices: polygon_vertices(&pts, &arcs) },
    };
    Ok(ArcDecomposition {
        angles: pts.iter().map(|p| p.0).collect(),
        points: pts.into_iter().map(|p| p.1).collect(),
        arcs,
        verdict,
    })
}

/// Arc endpoints and pivots in angular order, without repeats or points
/// interior to an edge.
fn polygon_vertices(pts: &[(f64, Point)], arcs: &[Arc]) -> Vec<Point> {
    let mut cands: Vec<Point> = Vec::new();
    for (p, arc) in pts.iter().zip(arcs) {
        cands.push(p.1.clone());
        cands.push(arc.pivot.clone());
    }
    let mut out: Vec<Point> = Vec::new();
    for c in cands {
        if out.last().is_none_or(|l| (l - &c).norm() >= MERGE_DIST) {
            out.push(c);
        }
    }
    while out.len() > 1 && (&out[0] - &out[out.len() - 1]).norm() < MERGE_DIST {
        out.pop();
    }
    loop {
        let m = out.len();
        if m <= 3 {
            break;
        }
        let drop = (0..m).find(|&i| {
            let prev = &out[(i + m - 1) % m];
            let next = &out[(i + 1) % m];
            let u = &out[i] - prev;
            let v = next - &out[i];
            cross(&u, &v).abs() <= COLLINEAR_SINE * u.norm() * v.norm()
        });
        match drop {
            Some(i) => {
                out.remove(i);
            }
            None => break,
        }
    }
    out
}
