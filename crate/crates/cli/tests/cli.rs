use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbert-lab")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = lab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

/// Pixel coordinates of every `<circle>` of the given class.
fn circles(svg: &str, class: &str) -> Vec<(f64, f64)> {
    let tag = format!(r#"<circle class="{class}" cx=""#);
    svg.lines()
        .filter_map(|l| l.strip_prefix(&tag))
        .map(|rest| {
            let (x, rest) = rest.split_once('"').unwrap();
            let y = rest.split('"').nth(1).unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn polygon_points(svg: &str, class: &str) -> Vec<(f64, f64)> {
    let tag = format!(r#"class="{class}" points=""#);
    let line = svg.lines().find(|l| l.contains(&tag)).expect("overlay present");
    let pts = line.split(&tag).nth(1).unwrap().split('"').next().unwrap();
    pts.split(' ')
        .map(|p| {
            let (x, y) = p.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn dist_on_the_square() {
    let v = json(&["dist", "--body", "builtin:square", "--p", "0,0", "--q", "0.5,0"]);
    assert_eq!(v["schema"], "hilbert-lab/1");
    assert_eq!(v["experiment"], "dist");
    let d = v["result"]["distance"].as_f64().unwrap();
    assert!((d - 0.5 * 3f64.ln()).abs() < 1e-12, "{d}");
    assert_eq!(v["config"]["body"], "builtin:square");

    let v = json(&["dist", "--body", "builtin:square", "--p", "-0.3,0.2", "--q", "-0.3,0.2"]);
    assert_eq!(v["result"]["distance"].as_f64().unwrap(), 0.0);
}

#[test]
fn exit_codes() {
    let out = lab(&["dist", "--body", "builtin:square", "--p", "0,0", "--q", "2,0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("point not interior"));

    let out = lab(&["dist", "--body", "builtin:square", "--p", "0,x", "--q", "0,0"]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lab(&["dist", "--body", "builtin:square", "--p", "0,0", "--q", "0,0", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(lab(&["dist", "--body", "builtin:nothing", "--p", "0,0", "--q", "0,0"]).status.code(), Some(2));
    assert_eq!(lab(&["dist", "--p", "0,0", "--q", "0,0"]).status.code(), Some(2));
}

#[test]
fn body_files_reject_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("tri.json");
    std::fs::write(&good, r#"{"type":"polytope_v","vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
    let v = json(&["dist", "--body", good.to_str().unwrap(), "--p", "0.25,0.25", "--q", "0.25,0.25"]);
    assert_eq!(v["result"]["distance"].as_f64().unwrap(), 0.0);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"type":"polytope_v","vertices":[[0,0],[1,0],[0,1]],"colour":"red"}"#).unwrap();
    let out = lab(&["dist", "--body", bad.to_str().unwrap(), "--p", "0.25,0.25", "--q", "0.25,0.25"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_sphere_in_the_disk_is_a_euclidean_circle() {
    // in the disk, the metric sphere of radius artanh(1/2) about the origin is the circle of radius 1/2
    let r = 0.5f64.atanh().to_string();
    let svg = stdout(&["render", "--body", "builtin:disk", "--sphere", &r]);
    let center = circles(&svg, "center")[0];
    let body = polygon_points(&svg, "body");
    let body_r = body.iter().map(|p| ((p.0 - center.0).powi(2) + (p.1 - center.1).powi(2)).sqrt()).fold(0.0, f64::max);
    for p in polygon_points(&svg, "sphere") {
        let rho = ((p.0 - center.0).powi(2) + (p.1 - center.1).powi(2)).sqrt() / body_r;
        assert!((rho - 0.5).abs() < 1e-5, "{rho}");
    }
}

#[test]
fn render_chord_endpoints_on_the_square() {
    let svg = stdout(&["render", "--body", "builtin:square", "--chord", "-0.5,0;0.5,0"]);
    let pts = circles(&svg, "chord-point");
    assert_eq!(pts.len(), 4);
    let body = polygon_points(&svg, "body");
    let xs: Vec<f64> = body.iter().map(|p| p.0).collect();
    let (left, right) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(0.0, f64::max));
    let ys: Vec<f64> = body.iter().map(|p| p.1).collect();
    let mid = 0.5 * (ys.iter().copied().fold(f64::INFINITY, f64::min) + ys.iter().copied().fold(0.0, f64::max));
    // labeled a, p, q, b in order along the chord
    assert!((pts[0].0 - left).abs() < 1e-6 && (pts[0].1 - mid).abs() < 1e-6);
    assert!((pts[3].0 - right).abs() < 1e-6 && (pts[3].1 - mid).abs() < 1e-6);
    assert!(pts[0].0 < pts[1].0 && pts[1].0 < pts[2].0 && pts[2].0 < pts[3].0);
    for label in ["a", "p", "q", "b"] {
        assert!(svg.contains(&format!(">{label}</text>")));
    }
}

#[test]
fn render_section_of_the_cube() {
    let svg = stdout(&["render", "--body", "builtin:cube", "--e1", "1,0,0", "--e2", "0,1,1", "--geodesic", "1,0"]);
    assert_eq!(polygon_points(&svg, "body").len(), 4);
    let out = lab(&["render", "--body", "builtin:cube", "--e1", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let runs: [&[&str]; 5] = [
        &["render", "--body", "builtin:hexagon", "--sphere", "0.7", "--geodesic", "1,0", "--Y", "midpoints", "--detect"],
        &["geodesic", "--body", "builtin:disk", "--target", "0.6,0.8", "--format", "csv"],
        &["kn", "--body", "builtin:square", "--x", "1,0", "--y", "0,1", "--format", "json"],
        &["visibility", "--body", "builtin:disk", "--samples", "24"],
        &["verdict", "--body", "builtin:cube", "--sections", "2", "--samples", "90"],
    ];
    for args in runs {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.svg");
    let path = path.to_str().unwrap();
    let out = lab(&["render", "--body", "builtin:square", "--out", path]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let a = std::fs::read_to_string(path).unwrap();
    let b = stdout(&["render", "--body", "builtin:square", "--out", path]);
    assert!(b.is_empty());
    assert_eq!(a, std::fs::read_to_string(path).unwrap());
    assert!(a.starts_with("<svg"));
}

#[test]
fn csv_starts_with_the_config_line() {
    let csv = stdout(&["geodesic", "--body", "builtin:square", "--target", "1,1", "--schedule", "1,2,40", "--format", "csv"]);
    let mut lines = csv.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# hilbert-lab/1 {"));
    assert_eq!(lines.next().unwrap(), "t,x0,x1,residual");
    // far out the coordinates round onto the corner but the residual stays exact
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(last[0], 40.0);
    assert!(last[3].abs() < 1e-9);
}

#[test]
fn detect_finds_the_square_corners() {
    let v = json(&["detect", "--body", "builtin:square"]);
    let verdict = &v["result"]["verdict"];
    assert_eq!(verdict["verdict"], "polygon");
    let mut got: Vec<(i64, i64)> = verdict["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap().round() as i64, p[1].as_f64().unwrap().round() as i64))
        .collect();
    got.sort();
    assert_eq!(got, vec![(-1, -1), (-1, 1), (1, -1), (1, 1)]);
    for p in verdict["vertices"].as_array().unwrap() {
        for c in p.as_array().unwrap() {
            assert!((c.as_f64().unwrap().abs() - 1.0).abs() < 1e-6);
        }
    }

    let v = json(&["detect", "--body", "builtin:disk", "--Y", "angles:12"]);
    assert_eq!(v["result"]["verdict"]["verdict"], "not_polygonal");
}

#[test]
fn pack_euclidean_bracket() {
    let v = json(&["pack", "--norm", "lp2", "--A", "1", "--no-grid"]);
    let b = &v["result"]["bounds"];
    assert!(b["lower"].as_u64().unwrap() >= 2);
    assert_eq!(b["upper"].as_u64().unwrap(), 81);
    assert_eq!(b["witnesses"].as_array().unwrap().len() as u64, b["lower"].as_u64().unwrap());
}

#[test]
fn kn_on_the_square() {
    let v = json(&["kn", "--body", "builtin:square", "--x", "1,0", "--y", "0,1"]);
    let r = &v["result"];
    let curve = r["curve"].as_array().unwrap();
    assert_eq!(curve.len(), 15);
    for row in curve {
        assert!(row["defect"].as_f64().unwrap() >= -1e-12);
    }
    // the defect along two edge-midpoint rays of the square levels off below ln 2
    let last = curve.last().unwrap()["defect"].as_f64().unwrap();
    assert!(last > 0.5 && last < 2f64.ln() + 1e-9, "{last}");
}

#[test]
fn fit_and_directions_on_the_triangle() {
    let v = json(&["fit", "--body", "builtin:simplex2", "--pairs", "30"]);
    let a = v["result"]["A"].as_f64().unwrap();
    assert!((1.0 - 1e-9..1.0 + 1e-6).contains(&a), "{a}");

    let v = json(&["directions", "--body", "builtin:simplex2", "--schedule", "geometric:8"]);
    assert_eq!(v["result"]["pairs"].as_array().unwrap().len(), 3);

    let out = lab(&["fit", "--body", "builtin:square"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn format_mismatch_is_an_input_error() {
    assert_eq!(lab(&["dist", "--body", "builtin:square", "--p", "0,0", "--q", "0,0", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(lab(&["render", "--body", "builtin:square", "--format", "json"]).status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["pack", "--norm", "lpinf", "--A", "1", "--restarts", "2"];
    let run = |n: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_hilbert-lab")).args(args).env("HILBERT_LAB_THREADS", n).output().unwrap();
        assert!(out.status.success());
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["config"]["threads"] = serde_json::Value::Null;
        v
    };
    assert_eq!(run("1"), run("4"));
}
