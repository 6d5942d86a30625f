use hilbert_core::geometry::{orthonormalize, AnchoredPoint, BodyDescriptor, ConvexBody, Point};
use hilbert_core::lab::{
    arc_decompose, asymptotic_directions, boundary_param, geometric_schedule, kn_estimate, max_visibility_set,
    polytope_verdict, qi_fit_map, suite, SectionBudget,
};
use hilbert_core::metric::{anchored_distance, distance_report, metric_sphere, metric_sphere_directions, GeodesicRay};
use hilbert_core::norms::{packing_bounds, Norm, NormDescriptor, PackingBudget, SimplexChart};
use hilbert_core::report::{self, GeodesicSample};
use nalgebra::DVector;
use serde::Serialize;

use crate::render::RenderScene;
use crate::{parse, Cli, CliError, Command, Format, RunConfig};

/// Seed of experiments without a library default of their own.
const DEFAULT_SEED: u64 = 7;

struct Ctx<'a> {
    cli: &'a Cli,
    config: RunConfig<'a>,
}

impl Ctx<'_> {
    fn body(&self) -> Result<ConvexBody, CliError> {
        let source = self.cli.body.as_deref().ok_or_else(|| CliError::Input("--body is required".into()))?;
        let body = parse::body(source)?;
        match self.cli.tol {
            Some(t) => Ok(body.with_tolerance(t)?),
            None => Ok(body),
        }
    }

    fn schedule(&self) -> Result<Vec<f64>, CliError> {
        match &self.cli.schedule {
            Some(s) => parse::schedule(s),
            None => Ok(geometric_schedule(14)),
        }
    }

    fn point_or_center(&self, text: &Option<String>, body: &ConvexBody) -> Result<Point, CliError> {
        match text {
            Some(t) => parse::point(t),
            None => Ok(body.center().clone()),
        }
    }

    fn config_line(&self) -> String {
        serde_json::to_string(&self.config).expect("config serializes")
    }

    fn json<R: Serialize>(&self, experiment: &str, result: &R) -> Result<String, CliError> {
        Ok(report::envelope_json(experiment, &self.config, result)?)
    }

    /// CSV body preceded by a `#` line echoing the configuration.
    fn csv(&self, body: String) -> String {
        format!("# {} {}\n{body}", report::SCHEMA_VERSION, self.config_line())
    }

    fn emit<R: Serialize>(
        &self,
        experiment: &str,
        result: &R,
        csv: Option<&dyn Fn() -> hilbert_core::Result<String>>,
    ) -> Result<String, CliError> {
        match (self.config.format, csv) {
            (Format::Json, _) => self.json(experiment, result),
            (Format::Csv, Some(f)) => Ok(self.csv(f()?)),
            (f, _) => Err(CliError::Input(format!("{experiment} does not write {f:?} output"))),
        }
    }
}

fn vec_of(p: &Point) -> Vec<f64> {
    p.iter().copied().collect()
}

/// Chart of a simplex body given by its vertices.
fn simplex_chart(body: &ConvexBody) -> Result<SimplexChart, CliError> {
    match body.descriptor() {
        BodyDescriptor::PolytopeV { vertices } if vertices.len() == body.dim() + 1 => {
            Ok(SimplexChart::new(vertices.iter().map(|v| DVector::from_column_slice(v)).collect())?)
        }
        _ => Err(CliError::Input("this command needs a simplex body given by its m + 1 vertices".into())),
    }
}

fn section_basis(e1: &str, e2: &str) -> Result<[DVector<f64>; 2], CliError> {
    Ok(orthonormalize(&parse::point(e1)?, &parse::point(e2)?)?)
}

/// `midpoints`, `angles:K` or an explicit list.
fn boundary_points(body: &ConvexBody, source: &str) -> Result<Vec<Point>, CliError> {
    if source == "midpoints" {
        if !body.is_polytope() {
            return Err(CliError::Input("midpoints need a polygon body".into()));
        }
        let v = body.outline(0)?;
        let k = v.len();
        return Ok((0..k).map(|i| (&v[i] + &v[(i + 1) % k]) * 0.5).collect());
    }
    if let Some(k) = source.strip_prefix("angles:") {
        let k: usize = k.parse().map_err(|_| CliError::Input(format!("bad sample count in {source:?}")))?;
        return (0..k)
            .map(|i| Ok(boundary_param(body, std::f64::consts::TAU * i as f64 / k as f64)?))
            .collect();
    }
    parse::points(source)
}

#[derive(Serialize)]
struct SectionOutput {
    section: BodyDescriptor,
    /// Outline in section coordinates.
    outline: Vec<Vec<f64>>,
    /// The same outline embedded in the body's space.
    embedded: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct GeodesicOutput {
    ray: hilbert_core::metric::RaySummary,
    samples: Vec<GeodesicSample>,
}

pub fn dispatch(cli: &Cli, threads: Option<usize>) -> Result<String, CliError> {
    let default_format = if matches!(cli.command, Command::Render(_)) { Format::Svg } else { Format::Json };
    let ctx = Ctx {
        cli,
        config: RunConfig {
            command: &cli.command,
            body: cli.body.as_deref(),
            seed: cli.seed,
            tol: cli.tol,
            schedule: cli.schedule.as_deref(),
            format: cli.format.unwrap_or(default_format),
            out: cli.out.as_deref(),
            threads,
        },
    };
    match &cli.command {
        Command::Dist(a) => {
            let body = ctx.body()?;
            let r = distance_report(&body, &parse::point(&a.p)?, &parse::point(&a.q)?)?;
            ctx.emit("dist", &r, None)
        }
        Command::Geodesic(a) => {
            let body = ctx.body()?;
            let base = ctx.point_or_center(&a.base, &body)?;
            let ray = match (&a.target, &a.dir) {
                (Some(t), _) => GeodesicRay::new(&body, &base, &parse::point(t)?)?,
                (None, Some(d)) => GeodesicRay::toward(&body, &base, &parse::point(d)?)?,
                (None, None) => return Err(CliError::Input("geodesic needs --target or --dir".into())),
            };
            let samples = ctx
                .schedule()?
                .iter()
                .map(|&t| {
                    let p = ray.eval(t)?;
                    let d = anchored_distance(&body, &AnchoredPoint::plain(base.clone()), &ray.anchored(t)?)?;
                    Ok(GeodesicSample { t, point: vec_of(&p), residual: d - t })
                })
                .collect::<hilbert_core::Result<Vec<_>>>()?;
            let out = GeodesicOutput { ray: ray.summary(), samples };
            ctx.emit("geodesic", &out, Some(&|| report::geodesic_csv(&out.samples)))
        }
        Command::Sphere(a) => {
            let body = ctx.body()?;
            let c = ctx.point_or_center(&a.center, &body)?;
            let s = if body.dim() == 2 {
                metric_sphere(&body, &c, a.radius, a.samples)?
            } else {
                metric_sphere_directions(&body, &c, a.radius, a.samples, cli.seed.unwrap_or(DEFAULT_SEED))?
            };
            ctx.emit("sphere", &s, Some(&|| report::sphere_csv(&s)))
        }
        Command::Section(a) => {
            let body = ctx.body()?;
            let anchor = ctx.point_or_center(&a.anchor, &body)?;
            let sec = body.plane_section(&anchor, section_basis(&a.e1, &a.e2)?)?;
            let outline = sec.body.outline(256)?;
            let out = SectionOutput {
                section: sec.body.descriptor(),
                outline: outline.iter().map(vec_of).collect(),
                embedded: outline.iter().map(|u| vec_of(&sec.embed(u))).collect(),
            };
            let rows: Vec<Vec<f64>> = out.outline.iter().zip(&out.embedded).map(|(u, x)| [u.clone(), x.clone()].concat()).collect();
            let mut header: Vec<String> = vec!["u".into(), "v".into()];
            header.extend((0..body.dim()).map(|i| format!("x{i}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            ctx.emit("section", &out, Some(&|| report::table_csv(&header, &rows)))
        }
        Command::Render(a) => render(&ctx, a),
        Command::Kn(a) => {
            let body = ctx.body()?;
            let p0 = ctx.point_or_center(&a.p0, &body)?;
            let k = kn_estimate(&body, &p0, &parse::point(&a.x)?, &parse::point(&a.y)?, &ctx.schedule()?)?;
            ctx.emit("kn", &k, Some(&|| report::defect_csv(&k.curve)))
        }
        Command::Fit(a) => {
            let body = ctx.body()?;
            let chart = simplex_chart(&body)?;
            let pairs = suite::simplex_sample_pairs(&chart, a.pairs, cli.seed.unwrap_or(DEFAULT_SEED));
            let fit = qi_fit_map(chart.body(), &chart, &pairs)?;
            let rows: Vec<Vec<f64>> = fit.distances.iter().zip(&fit.image_distances).map(|(d, e)| vec![*d, *e]).collect();
            ctx.emit("fit", &fit, Some(&|| report::table_csv(&["distance", "image_distance"], &rows)))
        }
        Command::Pack(a) => {
            let norm = match (&a.norm, &a.norm_file) {
                (_, Some(path)) => {
                    let text =
                        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
                    let d: NormDescriptor =
                        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
                    Norm::from_descriptor(&d)?
                }
                (Some(n), None) => Norm::from_shorthand(n, a.dim)?,
                (None, None) => Norm::euclidean(a.dim),
            };
            let mut budget = PackingBudget::default();
            if let Some(s) = cli.seed {
                budget.seed = s;
            };
            if let Some(r) = a.restarts {
                budget.restarts = r;
            }
            if let Some(c) = a.candidates {
                budget.candidates = c;
            }
            if a.no_grid {
                budget.grid_max_points = 0;
            }
            let b = packing_bounds(&norm, a.a, &budget)?;
            let dim = b.witnesses.first().map_or(0, |w| w.len());
            let header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            #[derive(Serialize)]
            struct Out<'a> {
                budget: &'a PackingBudget,
                bounds: &'a hilbert_core::PackingBounds,
            }
            ctx.emit("pack", &Out { budget: &budget, bounds: &b }, Some(&|| report::table_csv(&header, &b.witnesses)))
        }
        Command::Visibility(a) => {
            let body = ctx.body()?;
            let samples = match &a.points {
                Some(p) => parse::points(p)?,
                None => {
                    if body.dim() != 2 {
                        return Err(CliError::Input("visibility needs a 2-D body".into()));
                    }
                    let c = body.center().clone();
                    (0..a.samples)
                        .map(|i| {
                            let th = std::f64::consts::TAU * (i as f64 + 0.5) / a.samples as f64;
                            let dir = DVector::from_vec(vec![th.cos(), th.sin()]);
                            let (_, ahead) = body.extents(&c, &dir)?;
                            Ok(&c + dir * ahead)
                        })
                        .collect::<hilbert_core::Result<Vec<_>>>()?
                }
            };
            let v = max_visibility_set(&body, &samples)?;
            let rows: Vec<Vec<f64>> = v.points().iter().map(vec_of).collect();
            ctx.emit("visibility", &v, Some(&|| report::table_csv(&["x0", "x1"], &rows)))
        }
        Command::Detect(a) => {
            let body = ctx.body()?;
            let ys = boundary_points(&body, &a.y)?;
            let d = arc_decompose(&body, &ys)?;
            let rows: Vec<Vec<f64>> = d.vertices().unwrap_or(&[]).iter().map(vec_of).collect();
            ctx.emit("detect", &d, Some(&|| report::table_csv(&["x0", "x1"], &rows)))
        }
        Command::Verdict(a) => {
            let body = ctx.body()?;
            let anchor = a.anchor.as_deref().map(parse::point).transpose()?;
            let defaults = SectionBudget::default();
            let budget = SectionBudget {
                sections: a.sections,
                samples: a.samples,
                seed: cli.seed.unwrap_or(defaults.seed),
                ..defaults
            };
            let v = polytope_verdict(&body, anchor.as_ref(), &budget)?;
            let rows: Vec<Vec<f64>> = v
                .sections
                .iter()
                .enumerate()
                .map(|(i, s)| vec![i as f64, s.samples as f64, s.visibility as f64, s.vertices.len() as f64, s.polygon as u8 as f64])
                .collect();
            ctx.emit(
                "verdict",
                &v,
                Some(&|| report::table_csv(&["section", "samples", "visibility", "vertices", "polygon"], &rows)),
            )
        }
        Command::Directions(a) => {
            let body = ctx.body()?;
            let chart = simplex_chart(&body)?;
            let base = ctx.point_or_center(&a.base, &body)?;
            let targets = match &a.targets {
                Some(t) => parse::points(t)?,
                None => chart.vertices().to_vec(),
            };
            let rays = targets
                .iter()
                .map(|t| GeodesicRay::new(chart.body(), &base, t))
                .collect::<hilbert_core::Result<Vec<_>>>()?;
            let t = asymptotic_directions(&chart, &rays, &ctx.schedule()?, a.a, a.b)?;
            ctx.emit("directions", &t, Some(&|| report::directions_csv(&t)))
        }
        Command::Suite(_) => {
            let mut cfg = suite::SuiteConfig::default();
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let r = suite::run_suite(&cfg)?;
            ctx.emit("suite", &r, None)
        }
    }
}

fn render(ctx: &Ctx, a: &crate::RenderArgs) -> Result<String, CliError> {
    if ctx.config.format != Format::Svg {
        return Err(CliError::Input("render writes svg only".into()));
    }
    let full = ctx.body()?;
    let body = match (&a.anchor, &a.e1, &a.e2) {
        (anchor, Some(e1), Some(e2)) => {
            let anchor = ctx.point_or_center(anchor, &full)?;
            full.plane_section(&anchor, section_basis(e1, e2)?)?.body
        }
        (_, None, None) => full,
        _ => return Err(CliError::Input("a section directive needs both --e1 and --e2".into())),
    };
    let mut scene = RenderScene::new(&body)?;
    if let Some(r) = a.sphere {
        let c = ctx.point_or_center(&a.sphere_center, &body)?;
        scene.sphere(&body, &c, r)?;
    }
    if let Some(t) = &a.geodesic {
        let base = ctx.point_or_center(&a.geodesic_base, &body)?;
        scene.geodesic(&body, &base, &parse::point(t)?)?;
    }
    if let Some(c) = &a.chord {
        let pq = parse::points(c)?;
        if pq.len() != 2 {
            return Err(CliError::Input("--chord takes two points, P;Q".into()));
        }
        scene.chord(&body, &pq[0], &pq[1])?;
    }
    if let Some(y) = &a.y {
        let ys = boundary_points(&body, y)?;
        scene.markers("y", &ys)?;
        if a.detect {
            let d = arc_decompose(&body, &ys)?;
            if let Some(v) = d.vertices() {
                scene.markers("vertex", v)?;
            }
        }
    }
    Ok(scene.to_svg(&ctx.config_line()))
}
