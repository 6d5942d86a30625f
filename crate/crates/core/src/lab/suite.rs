//! The full experiment suite at desk-scale budgets, as one deterministic report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{shapes, ConvexBody, Point};
use crate::lab::{
    arc_decompose, asymptotic_directions, geometric_schedule, kn_estimate, max_visibility_set, polytope_verdict,
    qi_fit_map, ArcDecomposition, DirectionsTable, KnEstimate, QiFit, SectionBudget, SectionsVerdict,
};
use crate::metric::{distance_report, DistanceReport, GeodesicRay};
use crate::norms::{packing_bounds, Norm, PackingBounds, PackingBudget, SimplexChart};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Exponent of the geometric schedule `{1, ..., 2^k}`.
    pub schedule_exponent: u32,
    pub fit_pairs: usize,
    pub sections: SectionBudget,
    pub packing: PackingBudget,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            schedule_exponent: 14,
            fit_pairs: 100,
            sections: SectionBudget { sections: 5, samples: 180, ..SectionBudget::default() },
            packing: PackingBudget { restarts: 4, candidates: 400, grid_max_points: 0, ..PackingBudget::default() },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VisibilityEntry {
    pub body: String,
    pub samples: usize,
    pub size: usize,
    pub chosen: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DetectEntry {
    pub body: String,
    pub decomposition: ArcDecomposition,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictEntry {
    pub body: String,
    pub verdict: SectionsVerdict,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub distances: Vec<DistanceReport>,
    pub kn_adjacent: KnEstimate,
    pub kn_same_edge: KnEstimate,
    pub fit: Vec<QiFit>,
    pub packing: Vec<PackingBounds>,
    pub visibility: Vec<VisibilityEntry>,
    pub detect: Vec<DetectEntry>,
    pub verdicts: Vec<VerdictEntry>,
    pub directions: DirectionsTable,
}

fn pt(c: &[f64]) -> Point {
    Point::from_column_slice(c)
}

/// `n` seeded pairs of interior points of the simplex spanned by `chart`.
pub fn simplex_sample_pairs(chart: &SimplexChart, n: usize, seed: u64) -> Vec<(Point, Point)> {
    simplex_pairs(chart, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn simplex_pairs(chart: &SimplexChart, n: usize, rng: &mut ChaCha8Rng) -> Vec<(Point, Point)> {
    let m = chart.dim();
    let mut draw = || {
        let w: Vec<f64> = (0..=m).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = w.iter().sum();
        chart.vertices().iter().zip(&w).fold(Point::zeros(m), |acc, (v, wi)| acc + v * (wi / s))
    };
    (0..n).map(|_| (draw(), draw())).collect()
}

fn visibility_entry(name: &str, body: &ConvexBody, samples: Vec<Point>) -> Result<VisibilityEntry> {
    let v = max_visibility_set(body, &samples)?;
    Ok(VisibilityEntry { body: name.into(), samples: samples.len(), size: v.len(), chosen: v.chosen })
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sq = shapes::square();
    let disk = shapes::unit_disk();
    let o = pt(&[0., 0.]);

    let distances = vec![
        distance_report(&sq, &o, &pt(&[0.5, 0.]))?,
        distance_report(&disk, &o, &pt(&[0.5, 0.]))?,
        distance_report(&shapes::regular_polygon(6, 1.0)?, &pt(&[0.1, -0.2]), &pt(&[-0.3, 0.4]))?,
    ];

    let sched = geometric_schedule(config.schedule_exponent);
    let kn_adjacent = kn_estimate(&sq, &o, &pt(&[1., 0.]), &pt(&[0., 1.]), &sched)?;
    let kn_same_edge = kn_estimate(&sq, &o, &pt(&[1. / 3., 1.]), &pt(&[2. / 3., 1.]), &sched)?;

    let mut fit = Vec::new();
    for m in [2, 3] {
        let chart = SimplexChart::standard(m)?;
        let pairs = simplex_pairs(&chart, config.fit_pairs, &mut rng);
        fit.push(qi_fit_map(chart.body(), &chart, &pairs)?);
    }

    let mut packing = Vec::new();
    for norm in [Norm::lp(2.0, 2)?, Norm::lp(1.0, 2)?, Norm::lp(f64::INFINITY, 2)?, Norm::variation(2)?] {
        packing.push(packing_bounds(&norm, 1.0, &config.packing)?);
    }

    let square_samples: Vec<Point> =
        [[1., 0.], [1., 1.], [0., 1.], [-1., 1.], [-1., 0.], [-1., -1.], [0., -1.], [1., -1.]]
            .iter()
            .map(|c| pt(c))
            .collect();
    let ellipse = shapes::ellipse(1.6, 0.7, 0.4)?;
    let ellipse_samples =
        (0..50).map(|i| super::boundary_param(&ellipse, std::f64::consts::TAU * i as f64 / 50.0)).collect::<Result<_>>()?;
    let hexagon = shapes::regular_polygon(6, 1.0)?;
    let hv = shapes::regular_polygon_vertices(6, 1.0);
    let hex_samples = (0..6).map(|i| (&hv[i] + &hv[(i + 1) % 6]) * 0.5).collect();
    let visibility = vec![
        visibility_entry("square", &sq, square_samples)?,
        visibility_entry("hexagon", &hexagon, hex_samples)?,
        visibility_entry("ellipse", &ellipse, ellipse_samples)?,
    ];

    let mids = vec![pt(&[1., 0.]), pt(&[0., 1.]), pt(&[-1., 0.]), pt(&[0., -1.])];
    let detect = vec![
        DetectEntry { body: "square".into(), decomposition: arc_decompose(&sq, &mids)? },
        DetectEntry { body: "disk".into(), decomposition: arc_decompose(&disk, &mids)? },
    ];

    let verdicts = vec![
        VerdictEntry { body: "cube".into(), verdict: polytope_verdict(&shapes::cube(3), None, &config.sections)? },
        VerdictEntry {
            body: "simplex".into(),
            verdict: polytope_verdict(&shapes::standard_simplex(3), None, &config.sections)?,
        },
        VerdictEntry { body: "ball".into(), verdict: polytope_verdict(&shapes::unit_ball(3), None, &config.sections)? },
    ];

    let chart = SimplexChart::standard(2)?;
    let base = chart.vertices().iter().fold(Point::zeros(2), |s, v| s + v) / 3.0;
    let rays = chart.vertices().iter().map(|v| GeodesicRay::new(chart.body(), &base, v)).collect::<Result<Vec<_>>>()?;
    let directions = asymptotic_directions(&chart, &rays, &geometric_schedule(10), 1.0, 0.0)?;

    Ok(SuiteReport {
        config: config.clone(),
        distances,
        kn_adjacent,
        kn_same_edge,
        fit,
        packing,
        visibility,
        detect,
        verdicts,
        directions,
    })
}
