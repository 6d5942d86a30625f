//! Polytopes in H- and V-representation.
//!
//! Both representations end up as a list of facet half-spaces: chords are
//! exact ratio tests against that list, and the anchored (near-boundary)
//! distance route works purely with facet slacks.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::geometry::{AnchoredPoint, Point};

/// Upper bound on the number of subsets visited by the brute-force
/// vertex/facet enumeration.
const MAX_ENUMERATION: usize = 5_000_000;

/// Relative tolerance used while enumerating facets and vertices.
const ENUM_TOL: f64 = 1e-9;

/// `{x : <normal, x> < offset}` with a unit-length normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: DVector<f64>, offset: f64) -> Result<Halfspace> {
        let len = normal.norm();
        if !len.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidInput("non-finite half-space".into()));
        }
        if (len - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "half-space normal must have unit length, got {len}"
            )));
        }
        Ok(Halfspace { normal, offset })
    }

    /// Rescales an arbitrary nonzero normal (and its offset) to unit length.
    pub fn normalized(normal: DVector<f64>, offset: f64) -> Result<Halfspace> {
        let len = normal.norm();
        if len == 0.0 || !len.is_finite() {
            return Err(Error::Degenerate("zero half-space normal".into()));
        }
        Halfspace::new(normal / len, offset / len)
    }

    /// `offset - <normal, x>`; positive inside.
    pub fn slack(&self, x: &DVector<f64>) -> f64 {
        self.offset - self.normal.dot(x)
    }
}

/// Intersection of finitely many open half-spaces, bounded and full-dimensional.
#[derive(Clone, Debug)]
pub struct PolytopeH {
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Point>,
    center: Point,
    radius: f64,
}

impl PolytopeH {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<PolytopeH> {
        let dim = halfspaces
            .first()
            .map(|h| h.normal.len())
            .ok_or_else(|| Error::InvalidInput("polytope needs at least one half-space".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput("zero-dimensional half-space".into()));
        }
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: h.normal.len() });
            }
            if (h.normal.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput("half-space normal must have unit length".into()));
            }
        }
        let normals: Vec<Point> = halfspaces.iter().map(|h| h.normal.clone()).collect();
        if !origin_strictly_inside_hull(&normals)? {
            return Err(Error::Degenerate("half-space intersection is unbounded".into()));
        }
        let vertices = enumerate_vertices(&halfspaces, dim)?;
        if vertices.is_empty() {
            return Err(Error::Degenerate("half-space intersection is empty".into()));
        }
        if affine_rank(&vertices) < dim {
            return Err(Error::Degenerate("half-space intersection has empty interior".into()));
        }
        let center = centroid(&vertices);
        let radius = vertices.iter().map(|v| (v - &center).norm()).fold(0.0, f64::max);
        Ok(PolytopeH { halfspaces, vertices, center, radius })
    }

    /// Axis-aligned box `prod (lo_i, hi_i)`.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<PolytopeH> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let dim = lo.len();
        let mut hs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = DVector::zeros(dim);
            e[i] = 1.0;
            hs.push(Halfspace::new(e.clone(), hi[i])?);
            hs.push(Halfspace::new(-e, -lo[i])?);
        }
        PolytopeH::new(hs)
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Convex hull of a finite, affinely spanning point set.
#[derive(Clone, Debug)]
pub struct PolytopeV {
    input: Vec<Point>,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    center: Point,
    radius: f64,
}

impl PolytopeV {
    pub fn new(points: Vec<Point>) -> Result<PolytopeV> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::InvalidInput("polytope needs vertices".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput("zero-dimensional vertices".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidInput("non-finite vertex coordinate".into()));
            }
        }
        if points.len() < dim + 1 {
            return Err(Error::Degenerate(format!(
                "{} points cannot span R^{dim}",
                points.len()
            )));
        }
        if affine_rank(&points) < dim {
            return Err(Error::Degenerate("vertices are not full-dimensional".into()));
        }
        let (vertices, facets) = if dim == 2 {
            let hull = convex_hull_2d(&points);
            let facets = polygon_facets(&hull)?;
            (hull, facets)
        } else {
            let facets = hull_facets(&points)?;
            let vertices = extreme_points(&points, &facets);
            (vertices, facets)
        };
        let center = centroid(&vertices);
        let radius = vertices.iter().map(|v| (v - &center).norm()).fold(0.0, f64::max);
        Ok(PolytopeV { input: points, vertices, facets, center, radius })
    }

    /// The points as given at construction.
    pub fn input_points(&self) -> &[Point] {
        &self.input
    }

    /// Extreme points; counter-clockwise in the plane.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

pub(crate) fn centroid(points: &[Point]) -> Point {
    let mut c = DVector::zeros(points[0].len());
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// Affine rank of a point set, with a tolerance relative to its spread.
pub fn affine_rank(points: &[Point]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let dim = points[0].len();
    let c = centroid(points);
    let scale = points.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let m = DMatrix::from_fn(points.len(), dim, |i, j| (points[i][j] - c[j]) / scale);
    let sv = m.singular_values();
    sv.iter().filter(|s| **s > 1e-10).count()
}

/// Counter-clockwise hull by the monotone chain; collinear points dropped.
pub fn convex_hull_2d(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts.into_iter().map(|(x, y)| Point::from_vec(vec![x, y])).collect();
    }
    let scale = pts
        .iter()
        .map(|(x, y)| x.abs().max(y.abs()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale * scale;
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.into_iter().map(|(x, y)| Point::from_vec(vec![x, y])).collect()
}

/// Outward edge half-spaces of a counter-clockwise polygon.
pub(crate) fn polygon_facets(ccw: &[Point]) -> Result<Vec<Halfspace>> {
    let n = ccw.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = &ccw[i];
        let b = &ccw[(i + 1) % n];
        let normal = DVector::from_vec(vec![b[1] - a[1], a[0] - b[0]]);
        let len = normal.norm();
        let normal = normal / len;
        let offset = normal.dot(a);
        out.push(Halfspace::new(normal, offset)?);
    }
    Ok(out)
}

/// Normal of the hyperplane through `dim` points (generalized cross product).
fn hyperplane_normal(points: &[&Point]) -> Option<DVector<f64>> {
    let dim = points[0].len();
    let rows = dim - 1;
    let diffs = DMatrix::from_fn(rows, dim, |i, j| points[i + 1][j] - points[0][j]);
    let mut normal = DVector::zeros(dim);
    for j in 0..dim {
        let minor = diffs.clone().remove_column(j);
        let det = if rows == 0 { 1.0 } else { minor.determinant() };
        normal[j] = if j % 2 == 0 { det } else { -det };
    }
    let len = normal.norm();
    let row_scale: f64 = (0..rows).map(|i| diffs.row(i).norm()).product();
    if len <= 1e-10 * row_scale.max(f64::MIN_POSITIVE) || len == 0.0 {
        return None;
    }
    Some(normal / len)
}

/// Facets of `conv(points)` by brute force over `dim`-subsets.
///
/// The inputs must be full-dimensional. The tolerance is relative to the
/// spread of the point set.
pub fn hull_facets(points: &[Point]) -> Result<Vec<Halfspace>> {
    let dim = points[0].len();
    let c = centroid(points);
    let scale = points.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    if dim == 1 {
        let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return Ok(vec![
            Halfspace::new(DVector::from_element(1, 1.0), hi)?,
            Halfspace::new(DVector::from_element(1, -1.0), -lo)?,
        ]);
    }
    if dim == 2 {
        return polygon_facets(&convex_hull_2d(points));
    }
    check_enumeration_size(points.len(), dim)?;
    let local: Vec<Point> = points.iter().map(|p| (p - &c) / scale).collect();
    let mut facets: Vec<Halfspace> = Vec::new();
    for combo in (0..local.len()).combinations(dim) {
        let refs: Vec<&Point> = combo.iter().map(|&i| &local[i]).collect();
        let Some(normal) = hyperplane_normal(&refs) else { continue };
        let offset = normal.dot(refs[0]);
        let (mut above, mut below) = (false, false);
        for p in &local {
            let v = normal.dot(p) - offset;
            if v > ENUM_TOL {
                above = true;
            } else if v < -ENUM_TOL {
                below = true;
            }
            if above && below {
                break;
            }
        }
        let (n, o) = match (above, below) {
            (false, true) => (normal, offset),
            (true, false) => (-normal, -offset),
            _ => continue,
        };
        if facets
            .iter()
            .any(|f| (&f.normal - &n).norm() < 1e-7 && (f.offset - o).abs() < 1e-7)
        {
            continue;
        }
        facets.push(Halfspace { normal: n, offset: o });
    }
    // back to the original frame: <n, (x - c)/scale> < o  <=>  <n, x> < o*scale + <n, c>
    Ok(facets
        .into_iter()
        .map(|f| {
            let offset = f.offset * scale + f.normal.dot(&c);
            Halfspace { normal: f.normal, offset }
        })
        .collect())
}

fn extreme_points(points: &[Point], facets: &[Halfspace]) -> Vec<Point> {
    let dim = points[0].len();
    let c = centroid(points);
    let scale = points.iter().map(|p| (p - &c).norm()).fold(0.0, f64::max);
    let mut out: Vec<Point> = Vec::new();
    for p in points {
        let tight = facets.iter().filter(|f| f.slack(p).abs() <= 1e-8 * scale).count();
        if tight >= dim && !out.iter().any(|q| (q - p).norm() <= 1e-12 * scale) {
            out.push(p.clone());
        }
    }
    out
}

fn check_enumeration_size(n: usize, k: usize) -> Result<()> {
    let mut count: f64 = 1.0;
    for i in 0..k {
        count *= (n - i) as f64 / (i + 1) as f64;
    }
    if count > MAX_ENUMERATION as f64 {
        return Err(Error::InvalidInput(format!(
            "too many subsets ({count:.0}) for brute-force enumeration"
        )));
    }
    Ok(())
}

fn enumerate_vertices(halfspaces: &[Halfspace], dim: usize) -> Result<Vec<Point>> {
    if halfspaces.len() < dim {
        return Ok(Vec::new());
    }
    check_enumeration_size(halfspaces.len(), dim)?;
    let mut out: Vec<Point> = Vec::new();
    for combo in (0..halfspaces.len()).combinations(dim) {
        let a = DMatrix::from_fn(dim, dim, |i, j| halfspaces[combo[i]].normal[j]);
        let b = DVector::from_fn(dim, |i, _| halfspaces[combo[i]].offset);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            continue;
        }
        let Some(x) = lu.solve(&b) else { continue };
        let tol = ENUM_TOL * (1.0 + x.norm());
        if halfspaces.iter().all(|h| h.normal.dot(&x) - h.offset <= tol)
            && !out.iter().any(|v| (v - &x).norm() <= tol)
        {
            out.push(x);
        }
    }
    Ok(out)
}

/// Whether the origin is strictly interior to `conv(points)`; equivalently
/// the points positively span the space.
fn origin_strictly_inside_hull(points: &[Point]) -> Result<bool> {
    let dim = points[0].len();
    if points.len() < dim + 1 || affine_rank(points) < dim {
        return Ok(false);
    }
    let facets = hull_facets(points)?;
    Ok(facets.iter().all(|f| f.offset > 1e-9))
}

/// Largest normalized violation `max_i (<n_i, x> - o_i) / scale`.
pub(crate) fn facet_level(facets: &[Halfspace], x: &Point, scale: f64) -> f64 {
    facets
        .iter()
        .map(|h| h.normal.dot(x) - h.offset)
        .fold(f64::NEG_INFINITY, f64::max)
        / scale
}

/// Ratio tests: distances (in units of `dir`) to the boundary behind and ahead of `p`.
pub(crate) fn facet_extents(facets: &[Halfspace], p: &Point, dir: &DVector<f64>) -> Result<(f64, f64)> {
    let dnorm = dir.norm();
    let mut back = f64::INFINITY;
    let mut ahead = f64::INFINITY;
    for h in facets {
        let nd = h.normal.dot(dir);
        if nd.abs() <= 1e-15 * dnorm {
            continue;
        }
        let slack = h.slack(p).max(0.0);
        if nd > 0.0 {
            ahead = ahead.min(slack / nd);
        } else {
            back = back.min(slack / -nd);
        }
    }
    if !back.is_finite() || !ahead.is_finite() {
        return Err(Error::Degenerate("line does not leave the polytope".into()));
    }
    Ok((back, ahead))
}

/// Slack of an anchored point against each facet, in extended precision.
fn anchored_slacks(facets: &[Halfspace], p: &AnchoredPoint, snap: f64) -> Result<Vec<ExtReal>> {
    facets
        .iter()
        .map(|h| {
            let mut base = h.slack(&p.anchor);
            if p.anchor_on_boundary && base.abs() <= snap {
                base = 0.0;
            }
            let s = ExtReal::from(base) - p.scale * h.normal.dot(&p.offset);
            if s.is_positive() {
                Ok(s)
            } else {
                Err(Error::NotInterior)
            }
        })
        .collect()
}

/// Chord gaps `(back, ahead)` for the line through `p` and `q`, in units of `q - p`:
/// the boundary sits at `p - back (q - p)` and at `q + ahead (q - p)`.
/// `None` when the points coincide.
pub(crate) fn facet_anchored_gaps(
    facets: &[Halfspace],
    p: &AnchoredPoint,
    q: &AnchoredPoint,
    snap: f64,
) -> Result<Option<(ExtReal, ExtReal)>> {
    let sp = anchored_slacks(facets, p, snap)?;
    let sq = anchored_slacks(facets, q, snap)?;
    let mut back: Option<ExtReal> = None;
    let mut ahead: Option<ExtReal> = None;
    for (a, b) in sp.iter().zip(&sq) {
        let delta = *b - *a;
        if delta.is_positive() {
            let cand = *a / delta;
            back = Some(back.map_or(cand, |x| x.min(cand)));
        } else if delta.is_negative() {
            let cand = *b / -delta;
            ahead = Some(ahead.map_or(cand, |x| x.min(cand)));
        }
    }
    match (back, ahead) {
        (Some(b), Some(a)) => Ok(Some((b, a))),
        (None, None) => Ok(None),
        _ => Err(Error::Degenerate("line does not leave the polytope".into())),
    }
}
