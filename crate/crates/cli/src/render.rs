//! Deterministic SVG figures of planar bodies with overlays.

use std::fmt::Write as _;

use hilbert_core::geometry::{ConvexBody, Point};
use hilbert_core::lab::linear_schedule;
use hilbert_core::metric::{metric_sphere, GeodesicRay};
use nalgebra::DVector;
use serde::Serialize;

use crate::CliError;

/// Pixels per body circumdiameter.
pub const PIXELS_PER_DIAMETER: f64 = 512.0;
/// Margin added on each side of the body's bounding box, as a fraction of its size.
pub const MARGIN: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
pub struct Viewport {
    pub min: [f64; 2],
    pub max: [f64; 2],
    /// Pixels per body unit.
    pub scale: f64,
}

impl Viewport {
    fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|i| p[i] >= self.min[i] - 1e-12 && p[i] <= self.max[i] + 1e-12)
    }

    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        ((p[0] - self.min[0]) * self.scale, (self.max[1] - p[1]) * self.scale)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Overlay {
    Polyline { class: String, points: Vec<[f64; 2]>, closed: bool },
    Marker { class: String, at: [f64; 2], label: Option<String> },
}

#[derive(Clone, Debug, Serialize)]
pub struct RenderScene {
    pub outline: Vec<[f64; 2]>,
    pub overlays: Vec<Overlay>,
    pub viewport: Viewport,
}

fn xy(p: &Point) -> [f64; 2] {
    [p[0], p[1]]
}

impl RenderScene {
    /// Outline of `body` (which must be planar) and an empty overlay list.
    pub fn new(body: &ConvexBody) -> Result<RenderScene, CliError> {
        if body.dim() != 2 {
            return Err(CliError::Input("render needs a 2-D body or a section directive".into()));
        }
        let outline: Vec<[f64; 2]> = body.outline(256)?.iter().map(xy).collect();
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &outline {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        let diameter = outline
            .iter()
            .flat_map(|a| outline.iter().map(move |b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()))
            .fold(0.0, f64::max);
        let pad = [(hi[0] - lo[0]) * MARGIN, (hi[1] - lo[1]) * MARGIN];
        let viewport = Viewport {
            min: [lo[0] - pad[0], lo[1] - pad[1]],
            max: [hi[0] + pad[0], hi[1] + pad[1]],
            scale: PIXELS_PER_DIAMETER / diameter,
        };
        Ok(RenderScene { outline, overlays: Vec::new(), viewport })
    }

    fn push(&mut self, o: Overlay) -> Result<(), CliError> {
        let inside = match &o {
            Overlay::Polyline { points, .. } => points.iter().all(|p| self.viewport.contains(*p)),
            Overlay::Marker { at, .. } => self.viewport.contains(*at),
        };
        if !inside {
            return Err(CliError::Input("overlay leaves the viewport".into()));
        }
        self.overlays.push(o);
        Ok(())
    }

    pub fn sphere(&mut self, body: &ConvexBody, center: &Point, radius: f64) -> Result<(), CliError> {
        let pts = metric_sphere(body, center, radius, 256)?;
        let points = pts.iter().map(|s| [s.point[0], s.point[1]]).collect();
        self.push(Overlay::Polyline { class: "sphere".into(), points, closed: true })?;
        self.push(Overlay::Marker { class: "center".into(), at: xy(center), label: None })
    }

    pub fn geodesic(&mut self, body: &ConvexBody, base: &Point, target: &Point) -> Result<(), CliError> {
        let ray = GeodesicRay::new(body, base, target)?;
        let mut points: Vec<[f64; 2]> = vec![xy(base)];
        for t in linear_schedule(0.125, 8.0, 64) {
            points.push(xy(&ray.eval(t)?));
        }
        points.push(xy(target));
        self.push(Overlay::Polyline { class: "geodesic".into(), points, closed: false })?;
        self.push(Overlay::Marker { class: "target".into(), at: xy(target), label: None })
    }

    /// The chord through `p` and `q` with its four labeled points.
    pub fn chord(&mut self, body: &ConvexBody, p: &Point, q: &Point) -> Result<(), CliError> {
        let dir: DVector<f64> = q - p;
        if dir.norm() == 0.0 {
            return Err(CliError::Input("chord needs distinct points".into()));
        }
        let ch = body.chord(p, &dir)?;
        if !body.is_interior(q)? {
            return Err(hilbert_core::Error::NotInterior.into());
        }
        self.push(Overlay::Polyline { class: "chord".into(), points: vec![xy(&ch.a), xy(&ch.b)], closed: false })?;
        for (name, at) in [("a", &ch.a), ("p", p), ("q", q), ("b", &ch.b)] {
            self.push(Overlay::Marker { class: "chord-point".into(), at: xy(at), label: Some(name.into()) })?;
        }
        Ok(())
    }

    pub fn markers(&mut self, class: &str, pts: &[Point]) -> Result<(), CliError> {
        for p in pts {
            self.push(Overlay::Marker { class: class.into(), at: xy(p), label: None })?;
        }
        Ok(())
    }

    /// The SVG document, with `metadata` embedded verbatim (escaped).
    pub fn to_svg(&self, metadata: &str) -> String {
        let vp = &self.viewport;
        let (w, h) = ((vp.max[0] - vp.min[0]) * vp.scale, (vp.max[1] - vp.min[1]) * vp.scale);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.6}" height="{h:.6}" viewBox="0 0 {w:.6} {h:.6}">"#
        );
        let _ = writeln!(s, "<metadata>{}</metadata>", escape(metadata));
        let _ = writeln!(
            s,
            r#"<polygon class="body" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            self.coords(&self.outline)
        );
        for o in &self.overlays {
            match o {
                Overlay::Polyline { class, points, closed } => {
                    let tag = if *closed { "polygon" } else { "polyline" };
                    let _ = writeln!(
                        s,
                        r#"<{tag} class="{class}" points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
                        self.coords(points),
                        stroke(class)
                    );
                }
                Overlay::Marker { class, at, label } => {
                    let (x, y) = vp.px(*at);
                    let _ = writeln!(s, r#"<circle class="{class}" cx="{x:.6}" cy="{y:.6}" r="3" fill="{}"/>"#, stroke(class));
                    if let Some(l) = label {
                        let _ = writeln!(
                            s,
                            r#"<text class="{class}" x="{:.6}" y="{:.6}" font-size="12">{}</text>"#,
                            x + 4.0,
                            y - 4.0,
                            escape(l)
                        );
                    }
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }

    fn coords(&self, pts: &[[f64; 2]]) -> String {
        pts.iter()
            .map(|p| {
                let (x, y) = self.viewport.px(*p);
                format!("{x:.6},{y:.6}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn stroke(class: &str) -> &'static str {
    match class {
        "sphere" => "#1f77b4",
        "geodesic" => "#d62728",
        "chord" | "chord-point" => "#2ca02c",
        "vertex" => "#9467bd",
        _ => "#444444",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
