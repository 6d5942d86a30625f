//! Bounded open convex sets with membership and chord oracles.
//!
//! Every body answers two questions: where a point sits relative to the
//! boundary ([`ConvexBody::contains`]) and where a line through an interior
//! point leaves the body ([`ConvexBody::chord`]). Bodies are immutable and
//! cheap to clone.

mod affine;
mod descriptor;
mod ellipsoid;
mod polytope;
pub mod serde_point;
pub mod shapes;

use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use affine::AffineMap;
pub use descriptor::{AffineMapDescriptor, BodyDescriptor, HalfspaceDescriptor};
pub use ellipsoid::Ellipsoid;
pub use polytope::{affine_rank, convex_hull_2d, hull_facets, Halfspace, PolytopeH, PolytopeV};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// Coordinates in `R^m`.
pub type Point = DVector<f64>;

/// Default half-width of the boundary band, relative to the body's circumradius.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Result of a membership query; `Boundary` means "within the tolerance band".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Interior,
    Boundary,
    Exterior,
}

/// Ordered pair of boundary points; `u -> (1 - u) a + u b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    #[serde(with = "serde_point")]
    pub a: Point,
    #[serde(with = "serde_point")]
    pub b: Point,
}

impl Chord {
    pub fn new(a: Point, b: Point) -> Result<Chord> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
        }
        if a == b {
            return Err(Error::Degenerate("chord endpoints coincide".into()));
        }
        Ok(Chord { a, b })
    }

    pub fn point(&self, u: f64) -> Point {
        &self.a * (1.0 - u) + &self.b * u
    }

    /// Affine parameter of the orthogonal projection of `p` onto the chord line.
    pub fn param(&self, p: &Point) -> f64 {
        let ab = &self.b - &self.a;
        (p - &self.a).dot(&ab) / ab.norm_squared()
    }

    pub fn length(&self) -> f64 {
        (&self.b - &self.a).norm()
    }
}

/// A point written as `anchor + scale * offset`, with `scale` in extended
/// range.
///
/// Geodesic rays approach the boundary exponentially fast; their points are
/// anchored at the boundary target with a vanishing `scale`, so the slack
/// against the facets through the anchor is still known to full relative
/// precision. Ordinary points use `scale = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchoredPoint {
    pub anchor: Point,
    pub offset: DVector<f64>,
    pub scale: ExtReal,
    /// The anchor lies on the boundary; its boundary-band residuals are
    /// snapped to zero.
    pub anchor_on_boundary: bool,
}

impl AnchoredPoint {
    pub fn plain(p: Point) -> AnchoredPoint {
        let m = p.len();
        AnchoredPoint { anchor: p, offset: DVector::zeros(m), scale: ExtReal::ZERO, anchor_on_boundary: false }
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// Nearest `f64` coordinates; may round onto the boundary for large rays.
    pub fn position(&self) -> Point {
        &self.anchor + &self.offset * self.scale.to_f64()
    }

    /// `self - other` rounded to `f64`.
    pub(crate) fn difference(&self, other: &AnchoredPoint) -> DVector<f64> {
        (&self.anchor - &other.anchor) + &self.offset * self.scale.to_f64()
            - &other.offset * other.scale.to_f64()
    }

    fn map(&self, point: impl Fn(&Point) -> Point, linear: impl Fn(&DVector<f64>) -> DVector<f64>) -> AnchoredPoint {
        AnchoredPoint {
            anchor: point(&self.anchor),
            offset: linear(&self.offset),
            scale: self.scale,
            anchor_on_boundary: self.anchor_on_boundary,
        }
    }
}

#[derive(Debug)]
struct SectionShape {
    base: ConvexBody,
    anchor: Point,
    basis: [DVector<f64>; 2],
}

impl SectionShape {
    fn embed(&self, u: &Point) -> Point {
        &self.anchor + &self.basis[0] * u[0] + &self.basis[1] * u[1]
    }

    fn embed_linear(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis[0] * v[0] + &self.basis[1] * v[1]
    }
}

#[derive(Debug)]
enum Shape {
    H(PolytopeH),
    V(PolytopeV),
    Ellipsoid(Ellipsoid),
    Affine { base: ConvexBody, map: AffineMap },
    Section(SectionShape),
}

/// A bounded open convex subset of `R^m` with nonempty interior.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    shape: Arc<Shape>,
    dim: usize,
    center: Point,
    radius: f64,
    tol: f64,
}

impl From<PolytopeH> for ConvexBody {
    fn from(p: PolytopeH) -> Self {
        let (dim, center, radius) = (p.dim(), p.center().clone(), p.radius());
        ConvexBody::wrap(Shape::H(p), dim, center, radius)
    }
}

impl From<PolytopeV> for ConvexBody {
    fn from(p: PolytopeV) -> Self {
        let (dim, center, radius) = (p.dim(), p.center().clone(), p.radius());
        ConvexBody::wrap(Shape::V(p), dim, center, radius)
    }
}

impl From<Ellipsoid> for ConvexBody {
    fn from(e: Ellipsoid) -> Self {
        let (dim, center, radius) = (e.center().len(), e.center().clone(), e.radius());
        ConvexBody::wrap(Shape::Ellipsoid(e), dim, center, radius)
    }
}

impl ConvexBody {
    fn wrap(shape: Shape, dim: usize, center: Point, radius: f64) -> ConvexBody {
        ConvexBody { shape: Arc::new(shape), dim, center, radius, tol: DEFAULT_MEMBERSHIP_TOL }
    }

    pub fn polytope_h(halfspaces: Vec<Halfspace>) -> Result<ConvexBody> {
        Ok(PolytopeH::new(halfspaces)?.into())
    }

    pub fn polytope_v(vertices: Vec<Point>) -> Result<ConvexBody> {
        Ok(PolytopeV::new(vertices)?.into())
    }

    pub fn ellipsoid(center: Point, shape: nalgebra::DMatrix<f64>) -> Result<ConvexBody> {
        Ok(Ellipsoid::new(center, shape)?.into())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// A fixed interior reference point (vertex centroid, ellipsoid center, ...).
    pub fn center(&self) -> &Point {
        &self.center
    }

    /// Upper bound on the distance from [`center`](Self::center) to the boundary.
    pub fn circumradius(&self) -> f64 {
        self.radius
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Same body with a different boundary band.
    pub fn with_tolerance(&self, tol: f64) -> Result<ConvexBody> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidInput("membership tolerance must be positive".into()));
        }
        Ok(ConvexBody { tol, ..self.clone() })
    }

    /// Facets when the body is a polytope in its own coordinates.
    pub fn facets(&self) -> Option<&[Halfspace]> {
        match &*self.shape {
            Shape::H(p) => Some(p.halfspaces()),
            Shape::V(p) => Some(p.facets()),
            _ => None,
        }
    }

    pub fn is_polytope(&self) -> bool {
        match &*self.shape {
            Shape::H(_) | Shape::V(_) => true,
            Shape::Ellipsoid(_) => false,
            Shape::Affine { base, .. } => base.is_polytope(),
            Shape::Section(s) => s.base.is_polytope(),
        }
    }

    pub fn check_dim(&self, p: &Point) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(())
    }

    /// Signed distance-like defect: negative inside, zero on the boundary,
    /// normalized by the circumradius of the underlying primitive.
    pub fn level(&self, p: &Point) -> Result<f64> {
        self.check_dim(p)?;
        Ok(self.level_unchecked(p))
    }

    fn level_unchecked(&self, p: &Point) -> f64 {
        match &*self.shape {
            Shape::H(h) => polytope::facet_level(h.halfspaces(), p, h.radius()),
            Shape::V(v) => polytope::facet_level(v.facets(), p, v.radius()),
            Shape::Ellipsoid(e) => e.level(p),
            Shape::Affine { base, map } => base.level_unchecked(&map.pull(p)),
            Shape::Section(s) => s.base.level_unchecked(&s.embed(p)),
        }
    }

    pub fn contains(&self, p: &Point) -> Result<Classification> {
        let lvl = self.level(p)?;
        Ok(if lvl < -self.tol {
            Classification::Interior
        } else if lvl > self.tol {
            Classification::Exterior
        } else {
            Classification::Boundary
        })
    }

    pub fn is_interior(&self, p: &Point) -> Result<bool> {
        Ok(self.contains(p)? == Classification::Interior)
    }

    pub fn on_boundary(&self, p: &Point) -> Result<bool> {
        Ok(self.contains(p)? == Classification::Boundary)
    }

    /// Distances (in units of `dir`) from `p` to the boundary behind and
    /// ahead of it. `p` is assumed interior; `dir` need not be unit length.
    pub fn extents(&self, p: &Point, dir: &DVector<f64>) -> Result<(f64, f64)> {
        self.check_dim(p)?;
        self.check_dim(dir)?;
        if dir.norm() == 0.0 {
            return Err(Error::InvalidInput("zero direction".into()));
        }
        self.extents_unchecked(p, dir)
    }

    fn extents_unchecked(&self, p: &Point, dir: &DVector<f64>) -> Result<(f64, f64)> {
        match &*self.shape {
            Shape::H(h) => polytope::facet_extents(h.halfspaces(), p, dir),
            Shape::V(v) => polytope::facet_extents(v.facets(), p, dir),
            Shape::Ellipsoid(e) => e.extents(p, dir),
            Shape::Affine { base, map } => base.extents_unchecked(&map.pull(p), &map.pull_linear(dir)),
            Shape::Section(s) => s.base.extents_unchecked(&s.embed(p), &s.embed_linear(dir)),
        }
    }

    /// Intersection of the line through interior `p` along `dir` with the
    /// boundary; `a` is on the `-dir` side.
    pub fn chord(&self, p: &Point, dir: &DVector<f64>) -> Result<Chord> {
        if !self.is_interior(p)? {
            return Err(Error::NotInterior);
        }
        let (back, ahead) = self.extents(p, dir)?;
        if !(back > 0.0 && ahead > 0.0) {
            return Err(Error::Degenerate("chord has zero length on one side".into()));
        }
        Chord::new(p - dir * back, p + dir * ahead)
    }

    /// Chord gaps for the line through two anchored points: the boundary sits
    /// at `p - back (q - p)` and `q + ahead (q - p)`. `None` if `p == q`.
    pub fn anchored_gaps(&self, p: &AnchoredPoint, q: &AnchoredPoint) -> Result<Option<(ExtReal, ExtReal)>> {
        self.check_dim(&p.anchor)?;
        self.check_dim(&q.anchor)?;
        self.anchored_gaps_with(p, q, self.tol)
    }

    fn anchored_gaps_with(&self, p: &AnchoredPoint, q: &AnchoredPoint, tol: f64) -> Result<Option<(ExtReal, ExtReal)>> {
        match &*self.shape {
            Shape::H(h) => polytope::facet_anchored_gaps(h.halfspaces(), p, q, tol * h.radius()),
            Shape::V(v) => polytope::facet_anchored_gaps(v.facets(), p, q, tol * v.radius()),
            Shape::Ellipsoid(e) => e.anchored_gaps(p, q, tol * 2.0),
            Shape::Affine { base, map } => {
                let pull = |x: &AnchoredPoint| x.map(|a| map.pull(a), |v| map.pull_linear(v));
                base.anchored_gaps_with(&pull(p), &pull(q), tol)
            }
            Shape::Section(s) => {
                let embed = |x: &AnchoredPoint| x.map(|a| s.embed(a), |v| s.embed_linear(v));
                s.base.anchored_gaps_with(&embed(p), &embed(q), tol)
            }
        }
    }

    /// Image of the body under an invertible affine map.
    pub fn affine_image(&self, map: &AffineMap) -> Result<ConvexBody> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: map.dim() });
        }
        let (base, map) = match &*self.shape {
            Shape::Affine { base, map: inner } => (base.clone(), map.compose(inner)),
            _ => (self.clone(), map.clone()),
        };
        let center = map.apply(base.center());
        let radius = base.circumradius() * map.operator_norm();
        let mut out = ConvexBody::wrap(Shape::Affine { base, map }, self.dim, center, radius);
        out.tol = self.tol;
        Ok(out)
    }

    /// The 2-D body `{(u, v) : anchor + u e1 + v e2 in C}`.
    ///
    /// H-polytopes are restricted half-space by half-space to an explicit
    /// polygon; every other body delegates its oracles through the embedding.
    pub fn plane_section(&self, anchor: &Point, basis: [DVector<f64>; 2]) -> Result<PlaneSection> {
        self.check_dim(anchor)?;
        self.check_dim(&basis[0])?;
        self.check_dim(&basis[1])?;
        if self.dim < 2 {
            return Err(Error::InvalidInput("plane sections need dimension >= 2".into()));
        }
        if !self.is_interior(anchor)? {
            return Err(Error::NotInterior);
        }
        let (n0, n1, dot) = (basis[0].norm(), basis[1].norm(), basis[0].dot(&basis[1]));
        if n0 == 0.0 || n1 == 0.0 || (dot.abs() / (n0 * n1) - 1.0).abs() < 1e-9 {
            return Err(Error::Degenerate("section basis is not independent".into()));
        }
        if (n0 - 1.0).abs() > 1e-9 || (n1 - 1.0).abs() > 1e-9 || dot.abs() > 1e-9 {
            return Err(Error::InvalidInput("section basis must be orthonormal".into()));
        }
        let body = match &*self.shape {
            Shape::H(h) => {
                let mut hs = Vec::new();
                for f in h.halfspaces() {
                    let n = DVector::from_vec(vec![f.normal.dot(&basis[0]), f.normal.dot(&basis[1])]);
                    if n.norm() <= 1e-12 {
                        continue;
                    }
                    hs.push(Halfspace::normalized(n, f.offset - f.normal.dot(anchor))?);
                }
                let mut b: ConvexBody = PolytopeH::new(hs)?.into();
                b.tol = self.tol;
                b
            }
            _ => {
                let shape = SectionShape { base: self.clone(), anchor: anchor.clone(), basis: basis.clone() };
                let mut b = ConvexBody::wrap(Shape::Section(shape), 2, Point::zeros(2), self.radius * 2.0);
                b.tol = self.tol;
                b
            }
        };
        Ok(PlaneSection { base: self.clone(), anchor: anchor.clone(), basis, body })
    }

    /// Closed outline of a planar body: exact vertices for polygons and their
    /// affine images, `samples` boundary points otherwise.
    pub fn outline(&self, samples: usize) -> Result<Vec<Point>> {
        if self.dim != 2 {
            return Err(Error::InvalidInput("outline needs a 2-D body".into()));
        }
        match &*self.shape {
            Shape::V(v) => return Ok(v.vertices().to_vec()),
            Shape::H(h) => {
                let c = h.center();
                let mut vs = h.vertices().to_vec();
                vs.sort_by(|a, b| {
                    let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
                    let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
                    ta.partial_cmp(&tb).expect("finite angles")
                });
                return Ok(vs);
            }
            Shape::Affine { base, map } => {
                let pts = base.outline(samples)?;
                let mut out: Vec<Point> = pts.iter().map(|p| map.apply(p)).collect();
                if map.linear().determinant() < 0.0 {
                    out.reverse();
                }
                return Ok(out);
            }
            _ => {}
        }
        let k = samples.max(3);
        (0..k)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / k as f64;
                let dir = DVector::from_vec(vec![th.cos(), th.sin()]);
                let (_, ahead) = self.extents(&self.center, &dir)?;
                Ok(&self.center + dir * ahead)
            })
            .collect()
    }

    pub fn descriptor(&self) -> BodyDescriptor {
        BodyDescriptor::from_body(self)
    }
}

/// A 2-D slice of a body through an interior anchor.
#[derive(Clone, Debug)]
pub struct PlaneSection {
    pub base: ConvexBody,
    pub anchor: Point,
    pub basis: [DVector<f64>; 2],
    pub body: ConvexBody,
}

impl PlaneSection {
    pub fn embed(&self, u: &Point) -> Point {
        &self.anchor + &self.basis[0] * u[0] + &self.basis[1] * u[1]
    }
}

/// Gram-Schmidt on two vectors.
pub fn orthonormalize(u: &DVector<f64>, v: &DVector<f64>) -> Result<[DVector<f64>; 2]> {
    let nu = u.norm();
    if nu == 0.0 {
        return Err(Error::Degenerate("zero basis vector".into()));
    }
    let e1 = u / nu;
    let w = v - &e1 * e1.dot(v);
    let nw = w.norm();
    if nw <= 1e-12 * v.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Degenerate("section basis is not independent".into()));
    }
    Ok([e1, w / nw])
}

/// Generic chord by bracketing bisection on the membership oracle alone.
///
/// Used as an independent check of the structured chord routines.
pub fn chord_by_bisection(body: &ConvexBody, p: &Point, dir: &DVector<f64>) -> Result<Chord> {
    if !body.is_interior(p)? {
        return Err(Error::NotInterior);
    }
    let outside = |lambda: f64| -> Result<bool> { Ok(body.level(&(p + dir * lambda))? > 0.0) };
    let find = |sign: f64| -> Result<f64> {
        let mut lo = 0.0;
        let mut hi = body.circumradius().max(1e-300) / dir.norm();
        let mut guard = 0;
        while !outside(sign * hi)? {
            lo = hi;
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(Error::NonConvergence("bisection bracket".into()));
            }
        }
        for _ in 0..200 {
            if hi - lo <= 1e-12 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if outside(sign * mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let back = find(-1.0)?;
    let ahead = find(1.0)?;
    Chord::new(p - dir * back, p + dir * ahead)
}
