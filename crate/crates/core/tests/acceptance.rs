//! Acceptance gate: one line per criterion, nonzero exit on any failure.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use hilbert_core::geometry::{shapes, ConvexBody, Point};
use hilbert_core::lab::{
    arc_decompose, asymptotic_directions, boundary_param, exhaustive_visibility, geometric_schedule, kn_estimate,
    max_visibility_set, polytope_verdict, qi_fit_map, suite, SectionBudget,
};
use hilbert_core::metric::{anchored_distance, hilbert_distance, GeodesicRay};
use hilbert_core::norms::{packing_bounds, NormedMap, verify_packing, Norm, PackingBudget, SimplexChart};
use hilbert_core::AnchoredPoint;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lattice-annealing result for the Euclidean plane at A = 1 (see packing_oracle.rs).
const ORACLE_L2_A1: usize = 62;

type Outcome = Result<String, String>;

fn pt(c: &[f64]) -> Point {
    Point::from_column_slice(c)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

fn random_interior(body: &ConvexBody, rng: &mut ChaCha8Rng) -> Point {
    let r = body.circumradius();
    let c = body.center().clone();
    loop {
        let p = &c + DVector::from_fn(body.dim(), |_, _| rng.random_range(-r..r));
        if body.is_interior(&p).unwrap() {
            return p;
        }
    }
}

/// Convex polygon with vertices on the unit circle at sorted random angles,
/// every gap below pi so the origin is interior.
fn random_polygon(k: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    loop {
        let mut th: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..TAU)).collect();
        th.sort_by(f64::total_cmp);
        let gaps_ok = (0..k).all(|i| {
            let next = if i + 1 < k { th[i + 1] } else { th[0] + TAU };
            let g = next - th[i];
            g > 0.15 && g < 3.0
        });
        if gaps_ok {
            return th.iter().map(|t| pt(&[t.cos(), t.sin()])).collect();
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let disk = shapes::unit_disk();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let th = rng.random_range(0.0..TAU);
        let u = pt(&[th.cos(), th.sin()]);
        let (s, t) = (rng.random_range(-0.999..0.999), rng.random_range(-0.999..0.999));
        let d = hilbert_distance(&disk, &(&u * s), &(&u * t)).map_err(|e| e.to_string())?;
        let closed = (f64::atanh(t) - f64::atanh(s)).abs();
        worst = worst.max((d - closed).abs());
    }
    ensure(worst < 1e-9, || format!("max error {worst:e}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("max |d - artanh form| = {worst:.2e} over 1000 diameters"))
}

fn test_bodies(rng: &mut ChaCha8Rng) -> Vec<(&'static str, ConvexBody)> {
    let hex = ConvexBody::polytope_v(random_polygon(6, rng)).unwrap();
    let ell = shapes::ellipse(rng.random_range(1.0..2.0), rng.random_range(0.4..1.0), rng.random_range(0.0..3.0)).unwrap();
    vec![("square", shapes::square()), ("disk", shapes::unit_disk()), ("hexagon", hex), ("ellipse", ell)]
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut sym, mut tri, mut add) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for (_, body) in test_bodies(&mut rng) {
        for _ in 0..1000 {
            let (p, q, r) = (random_interior(&body, &mut rng), random_interior(&body, &mut rng), random_interior(&body, &mut rng));
            let d = |a: &Point, b: &Point| hilbert_distance(&body, a, b).unwrap();
            sym = sym.max((d(&p, &q) - d(&q, &p)).abs());
            tri = tri.max(d(&p, &q) - d(&p, &r) - d(&r, &q));
            let u = rng.random_range(0.0..1.0);
            let m = &p * (1.0 - u) + &r * u;
            add = add.max((d(&p, &r) - d(&p, &m) - d(&m, &r)).abs());
        }
    }
    ensure(sym <= 1e-12, || format!("symmetry error {sym:e}"))?;
    ensure(tri <= 1e-9, || format!("triangle excess {tri:e}"))?;
    ensure(add <= 1e-9, || format!("additivity error {add:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!("symmetry {sym:.1e}, triangle excess {tri:.1e}, additivity {add:.1e} on 4 bodies x 1000 triples"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for (name, body) in test_bodies(&mut rng) {
        let base = pt(&[0.1, -0.05]);
        for k in 0..8 {
            let th = 0.1 + TAU * k as f64 / 8.0;
            let ray = GeodesicRay::toward(&body, &base, &pt(&[th.cos(), th.sin()])).map_err(|e| e.to_string())?;
            for t in [0.1, 1.0, 5.0, 20.0] {
                let a = ray.anchored(t).map_err(|e| e.to_string())?;
                let d = anchored_distance(&body, &AnchoredPoint::plain(base.clone()), &a).map_err(|e| e.to_string())?;
                worst = worst.max((d - t).abs());
                if t <= 5.0 {
                    let plain = hilbert_distance(&body, &base, &ray.eval(t).unwrap()).map_err(|e| format!("{name}: {e}"))?;
                    worst = worst.max((plain - t).abs());
                }
            }
        }
    }
    ensure(worst < 1e-9, || format!("max |d - t| = {worst:e}"))?;
    Ok(format!("max |d(base, c(t)) - t| = {worst:.2e} on 4 bodies x 8 rays"))
}

fn simplex_points(chart: &SimplexChart, rng: &mut ChaCha8Rng) -> Point {
    let m = chart.dim();
    let w: Vec<f64> = (0..=m).map(|_| -rng.random_range(1e-6f64..1.0).ln()).collect();
    let s: f64 = w.iter().sum();
    chart.vertices().iter().zip(&w).fold(Point::zeros(m), |acc, (v, wi)| acc + v * (wi / s))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let random3 = SimplexChart::new((0..4).map(|_| DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0))).collect())
        .map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    for (name, chart) in [("2-simplex", SimplexChart::standard(2).unwrap()), ("3-simplex", SimplexChart::standard(3).unwrap()), ("random 3-simplex", random3)] {
        let pairs: Vec<(Point, Point)> = (0..1000).map(|_| (simplex_points(&chart, &mut rng), simplex_points(&chart, &mut rng))).collect();
        let mut worst = 0.0f64;
        for (p, q) in &pairs {
            let d = hilbert_distance(chart.body(), p, q).unwrap();
            let e = chart.norm().eval(&(chart.isometry(p).unwrap() - chart.isometry(q).unwrap())).unwrap();
            worst = worst.max((d - e).abs());
        }
        ensure(worst < 1e-8, || format!("{name}: isometry error {worst:e}"))?;
        let fit = qi_fit_map(chart.body(), &chart, &pairs).map_err(|e| e.to_string())?;
        ensure((fit.a - 1.0).abs() <= 1e-6 && fit.b < 1e-6, || format!("{name}: fit A = {}, B = {}", fit.a, fit.b))?;
        report.push(format!("{name} err {worst:.1e} A-1 {:.1e} B {:.1e}", fit.a - 1.0, fit.b));
    }
    Ok(report.join("; "))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let sq = shapes::square();
    let sched = geometric_schedule(14);
    let o = pt(&[0., 0.]);
    let adj = kn_estimate(&sq, &o, &pt(&[1., 0.]), &pt(&[0., 1.]), &sched).map_err(|e| e.to_string())?;
    let same = kn_estimate(&sq, &o, &pt(&[1. / 3., 1.]), &pt(&[2. / 3., 1.]), &sched).map_err(|e| e.to_string())?;
    ensure(adj.stabilization.stabilized, || format!("adjacent delta {:e}", adj.stabilization.delta))?;
    ensure(adj.k_hat.is_finite(), || "K-hat not finite".into())?;
    let last = same.curve.last().expect("nonempty curve").defect;
    ensure(last >= adj.k_hat + 5.0, || format!("same-edge defect {last} vs K-hat {}", adj.k_hat))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "K-hat = {:.6} (delta {:.1e}); same-edge defect at 2^14 = {:.3}",
        adj.k_hat, adj.stabilization.delta, last
    ))
}

fn criterion_6() -> Outcome {
    let quick = PackingBudget { grid_max_points: 0, ..PackingBudget::default() };
    let norms = [
        ("lp2", Norm::lp(2.0, 2).unwrap()),
        ("lp1", Norm::lp(1.0, 2).unwrap()),
        ("lpinf", Norm::lp(f64::INFINITY, 2).unwrap()),
        ("lp3/dim3", Norm::lp(3.0, 3).unwrap()),
        ("hexagonal", Norm::polyhedral(shapes::regular_polygon_vertices(6, 1.0)).unwrap()),
        ("variation", Norm::variation(2).unwrap()),
    ];
    let mut lines = Vec::new();
    for (name, norm) in &norms {
        for a in [1.0, 2.0, 5.0] {
            let budget = if *name == "lp2" && a == 1.0 { PackingBudget::default() } else { quick.clone() };
            let b = packing_bounds(norm, a, &budget).map_err(|e| e.to_string())?;
            let ws: Vec<DVector<f64>> = b.witnesses.iter().map(|w| DVector::from_column_slice(w)).collect();
            ensure(b.lower >= 2, || format!("{name} A={a}: lower {}", b.lower))?;
            ensure(b.lower as u64 <= b.upper, || format!("{name} A={a}: {} > {}", b.lower, b.upper))?;
            ensure(verify_packing(norm, a, &ws) && ws.len() == b.lower, || format!("{name} A={a}: witnesses fail"))?;
            if *name == "lp2" && a == 1.0 {
                ensure(b.lower == ORACLE_L2_A1, || format!("lp2 A=1: lower {} vs oracle {ORACLE_L2_A1}", b.lower))?;
            }
            lines.push(format!("{name}/A={a}: [{}, {}]", b.lower, b.upper));
        }
    }
    Ok(lines.join(", "))
}

fn criterion_7() -> Outcome {
    let sq = shapes::square();
    let samples: Vec<Point> = [[1., 0.], [1., 1.], [0., 1.], [-1., 1.], [-1., 0.], [-1., -1.], [0., -1.], [1., -1.]]
        .iter()
        .map(|c| pt(c))
        .collect();
    let v = max_visibility_set(&sq, &samples).map_err(|e| e.to_string())?;
    let brute = exhaustive_visibility(&sq, &samples).map_err(|e| e.to_string())?;
    ensure(v.len() == 4 && v.chosen == brute, || format!("square: {:?} vs exhaustive {brute:?}", v.chosen))?;
    for k in 3..=8 {
        let verts = shapes::regular_polygon_vertices(k, 1.0);
        let body = ConvexBody::polytope_v(verts.clone()).unwrap();
        let mids: Vec<Point> = (0..k).map(|i| (&verts[i] + &verts[(i + 1) % k]) * 0.5).collect();
        let n = max_visibility_set(&body, &mids).map_err(|e| e.to_string())?.len();
        ensure(n == k, || format!("{k}-gon: {n}"))?;
    }
    let e = shapes::ellipse(1.7, 0.6, 0.5).unwrap();
    let samples: Vec<Point> = (0..50).map(|i| boundary_param(&e, TAU * i as f64 / 50.0).unwrap()).collect();
    let n = max_visibility_set(&e, &samples).map_err(|e| e.to_string())?.len();
    ensure(n == 50, || format!("ellipse: {n}"))?;
    Ok("square 4 (= exhaustive), k-gons k for k = 3..8, ellipse 50".into())
}

/// Largest distance from an expected vertex to the nearest found one.
fn matched(found: &[Point], expected: &[Point]) -> f64 {
    if found.len() != expected.len() {
        return f64::INFINITY;
    }
    expected
        .iter()
        .map(|q| found.iter().map(|p| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn criterion_8() -> Outcome {
    let sq = shapes::square();
    let mids = vec![pt(&[1., 0.]), pt(&[0., 1.]), pt(&[-1., 0.]), pt(&[0., -1.])];
    let corners = vec![pt(&[1., 1.]), pt(&[-1., 1.]), pt(&[-1., -1.]), pt(&[1., -1.])];
    let dec = arc_decompose(&sq, &mids).map_err(|e| e.to_string())?;
    let err = dec.vertices().map_or(f64::INFINITY, |v| matched(v, &corners));
    ensure(err <= 1e-6, || format!("square vertex error {err:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for k in 3..=10 {
        for _ in 0..5 {
            let verts = random_polygon(k, &mut rng);
            let body = ConvexBody::polytope_v(verts.clone()).unwrap();
            let ys: Vec<Point> = (0..k)
                .map(|i| {
                    let u = rng.random_range(0.2..0.8);
                    &verts[i] * (1.0 - u) + &verts[(i + 1) % k] * u
                })
                .collect();
            let dec = arc_decompose(&body, &ys).map_err(|e| e.to_string())?;
            let err = dec.vertices().map_or(f64::INFINITY, |v| matched(v, &verts));
            ensure(err <= 1e-5, || format!("{k}-gon vertex error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    for (name, body) in [("disk", shapes::unit_disk()), ("ellipse", shapes::ellipse(1.4, 0.8, 0.7).unwrap())] {
        let ys: Vec<Point> = (0..6).map(|i| boundary_param(&body, 0.3 + TAU * i as f64 / 6.0).unwrap()).collect();
        let dec = arc_decompose(&body, &ys).map_err(|e| e.to_string())?;
        ensure(!dec.is_polygon(), || format!("{name} reported as polygon"))?;
    }
    Ok(format!("square err {err:.1e}; 40 random k-gons (k = 3..10) max err {worst:.1e}; disk, ellipse not polygonal"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let budget = SectionBudget::default();
    for (name, body) in [("cube", shapes::cube(3)), ("3-simplex", shapes::standard_simplex(3))] {
        let v = polytope_verdict(&body, None, &budget).map_err(|e| e.to_string())?;
        ensure(v.all_polygons && v.sections.len() == 20, || format!("{name}: {} sections, all polygons {}", v.sections.len(), v.all_polygons))?;
    }
    let v = polytope_verdict(&shapes::unit_ball(3), None, &budget).map_err(|e| e.to_string())?;
    ensure(!v.all_polygons && v.sections.len() == 1, || format!("ball: {} sections checked", v.sections.len()))?;
    within(start.elapsed(), 30.0)?;
    Ok("cube and 3-simplex pass 20 sections; ball fails the first".into())
}

fn criterion_10() -> Outcome {
    let chart = SimplexChart::standard(2).unwrap();
    let base = chart.vertices().iter().fold(Point::zeros(2), |s, v| s + v) / 3.0;
    let rays: Vec<GeodesicRay> = chart
        .vertices()
        .iter()
        .map(|v| GeodesicRay::new(chart.body(), &base, v).unwrap())
        .chain([GeodesicRay::toward(chart.body(), &base, &pt(&[0.3, -1.0])).unwrap()])
        .collect();
    let t = asymptotic_directions(&chart, &rays, &geometric_schedule(14), 1.0, 0.0).map_err(|e| e.to_string())?;
    let (excess, short) = (t.norm_excess(), t.separation_shortfall());
    ensure(excess <= 1e-9, || format!("norm exceeds bound by {excess:e}"))?;
    ensure(short <= 1e-9, || format!("distance below bound by {short:e}"))?;
    Ok(format!("max norm excess {excess:.1e}, max separation shortfall {short:.1e} over {} rows", t.rows.len()))
}

fn criterion_11() -> Outcome {
    let cfg = suite::SuiteConfig::default();
    let a = serde_json::to_string(&suite::run_suite(&cfg).map_err(|e| e.to_string())?).unwrap();
    let b = serde_json::to_string(&suite::run_suite(&cfg).map_err(|e| e.to_string())?).unwrap();
    ensure(a == b, || "suite reports differ".into())?;
    Ok(format!("two suite runs byte-identical ({} bytes)", a.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("Klein-model agreement", criterion_1),
        ("metric axioms", criterion_2),
        ("unit-speed geodesics", criterion_3),
        ("simplex isometry", criterion_4),
        ("defect dichotomy", criterion_5),
        ("packing bounds", criterion_6),
        ("visibility sets", criterion_7),
        ("polygon detector", criterion_8),
        ("section verdict", criterion_9),
        ("asymptotic directions", criterion_10),
        ("determinism", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("criterion {id:>2} PASS  {name} [{secs:.2}s]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name} [{secs:.2}s]: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
