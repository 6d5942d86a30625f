use std::f64::consts::TAU;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orthonormalize, ConvexBody, Point};
use crate::lab::{arc_decompose, max_visibility_set, radial};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionBudget {
    pub sections: usize,
    /// Boundary samples per section before refinement.
    pub samples: usize,
    /// Times the sample count is doubled after a failed decomposition.
    pub max_doublings: u32,
    pub seed: u64,
}

impl Default for SectionBudget {
    fn default() -> Self {
        SectionBudget { sections: 20, samples: 360, max_doublings: 2, seed: 0x5ec7 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionReport {
    pub basis: [Vec<f64>; 2],
    pub samples: usize,
    /// Size of the visibility set fed to the decomposition.
    pub visibility: usize,
    pub polygon: bool,
    /// Section vertices, in section coordinates.
    pub vertices: Vec<Vec<f64>>,
    pub failing_arc: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectionsVerdict {
    pub anchor: Vec<f64>,
    pub seed: u64,
    /// Reports up to and including the first failing section.
    pub sections: Vec<SectionReport>,
    pub all_polygons: bool,
}

/// Visibility set and arc decomposition of one section, doubling the
/// samples while the decomposition fails.
pub fn section_report(
    body: &ConvexBody,
    anchor: &Point,
    basis: [DVector<f64>; 2],
    samples: usize,
    max_doublings: u32,
    phase: f64,
) -> Result<SectionReport> {
    if samples < 3 {
        return Err(Error::InvalidInput("a section needs at least 3 samples".into()));
    }
    let section = body.plane_section(anchor, basis.clone())?;
    let plane = &section.body;
    let mut k = samples;
    let mut doublings = 0;
    loop {
        let pts: Vec<Point> = (0..k).map(|i| radial(plane, TAU * (i as f64 + phase) / k as f64)).collect();
        let vis = max_visibility_set(plane, &pts)?;
        let dec = arc_decompose(plane, &vis.points())?;
        let done = dec.is_polygon() || doublings >= max_doublings;
        if done {
            let vertices = dec.vertices().map(|vs| vs.iter().map(|v| v.iter().copied().collect()).collect()).unwrap_or_default();
            let failing_arc = match dec.verdict {
                crate::lab::PolygonVerdict::NotPolygonal { failing_arc } => Some(failing_arc),
                crate::lab::PolygonVerdict::Polygon { .. } => None,
            };
            return Ok(SectionReport {
                basis: [basis[0].iter().copied().collect(), basis[1].iter().copied().collect()],
                samples: k,
                visibility: vis.len(),
                polygon: failing_arc.is_none(),
                vertices,
                failing_arc,
            });
        }
        k *= 2;
        doublings += 1;
    }
}

fn random_unit(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Polygon checks on seeded random plane sections through `anchor`
/// (the body center by default), stopping at the first failure.
pub fn polytope_verdict(body: &ConvexBody, anchor: Option<&Point>, budget: &SectionBudget) -> Result<SectionsVerdict> {
    if body.dim() < 2 {
        return Err(Error::InvalidInput("plane sections need dimension >= 2".into()));
    }
    if budget.sections == 0 {
        return Err(Error::InvalidInput("at least one section is required".into()));
    }
    let anchor = anchor.cloned().unwrap_or_else(|| body.center().clone());
    if !body.is_interior(&anchor)? {
        return Err(Error::NotInterior);
    }
    let m = body.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut sections = Vec::new();
    let count = if m == 2 { 1 } else { budget.sections };
    for _ in 0..count {
        let basis = if m == 2 {
            [DVector::from_vec(vec![1.0, 0.0]), DVector::from_vec(vec![0.0, 1.0])]
        } else {
            loop {
                let (u, v) = (random_unit(&mut rng, m), random_unit(&mut rng, m));
                if let Ok(b) = orthonormalize(&u, &v) {
                    break b;
                }
            }
        };
        let phase = rng.random_range(0.0..1.0);
        let report = section_report(body, &anchor, basis, budget.samples, budget.max_doublings, phase)?;
        let failed = !report.polygon;
        sections.push(report);
        if failed {
            break;
        }
    }
    let all_polygons = sections.iter().all(|s| s.polygon);
    Ok(SectionsVerdict { anchor: anchor.iter().copied().collect(), seed: budget.seed, sections, all_polygons })
}
