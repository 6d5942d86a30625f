//! JSON envelopes and CSV mirrors for experiment output.

use serde::Serialize;

use crate::error::Result;
use crate::lab::{DefectPoint, DirectionsTable};
use crate::metric::SphereSample;

/// Version tag written into every report.
pub const SCHEMA_VERSION: &str = "hilbert-lab/1";

/// A report with its schema tag and the configuration that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub experiment: &'a str,
    pub config: &'a C,
    pub result: &'a R,
}

pub fn envelope_json<C: Serialize, R: Serialize>(experiment: &str, config: &C, result: &R) -> Result<String> {
    let env = Envelope { schema: SCHEMA_VERSION, experiment, config, result };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| crate::Error::InvalidInput(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Fixed-width float so CSV output does not depend on shortest-repr quirks.
fn num(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn defect_csv(curve: &[DefectPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "to_x", "to_y", "between", "defect"])?;
    for c in curve {
        w.write_record([num(c.t), num(c.to_x), num(c.to_y), num(c.between), num(c.defect)])?;
    }
    finish(w)
}

/// `angle, x_1..x_m, residual`.
pub fn sphere_csv(samples: &[SphereSample]) -> Result<String> {
    let m = samples.first().map_or(0, |s| s.point.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["theta".to_string()];
    head.extend((0..m).map(|i| format!("x{i}")));
    head.push("residual".into());
    w.write_record(&head)?;
    for s in samples {
        let mut row = vec![num(s.angle)];
        row.extend(s.point.iter().map(|&x| num(x)));
        row.push(num(s.residual));
        w.write_record(&row)?;
    }
    finish(w)
}

/// One geodesic sample: time, point, and `d(base, point) - t`.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: Vec<f64>,
    pub residual: f64,
}

pub fn geodesic_csv(samples: &[GeodesicSample]) -> Result<String> {
    let m = samples.first().map_or(0, |s| s.point.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["t".to_string()];
    head.extend((0..m).map(|i| format!("x{i}")));
    head.push("residual".into());
    w.write_record(&head)?;
    for s in samples {
        let mut row = vec![num(s.t)];
        row.extend(s.point.iter().map(|&x| num(x)));
        row.push(num(s.residual));
        w.write_record(&row)?;
    }
    finish(w)
}

/// `n, i, j, distance, lower_bound` per row and pair.
pub fn directions_csv(table: &DirectionsTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "i", "j", "distance", "lower_bound"])?;
    for r in &table.rows {
        for (k, p) in table.pairs.iter().enumerate() {
            w.write_record([num(r.n), p.i.to_string(), p.j.to_string(), num(r.distances[k]), num(r.lower_bounds[k])])?;
        }
    }
    finish(w)
}

/// Generic two-column-or-more table.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| num(x)))?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defect_csv_layout() {
        let rows = [DefectPoint { t: 1.0, to_x: 1.0, to_y: 1.0, between: 1.5, defect: 0.5 }];
        let s = defect_csv(&rows).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next(), Some("t,to_x,to_y,between,defect"));
        assert!(lines.next().unwrap().starts_with("1.000000000000e0,"));
    }

    #[test]
    fn envelope_has_schema() {
        let s = envelope_json("x", &1u8, &2u8).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema"], SCHEMA_VERSION);
        assert_eq!(v["result"], 2);
    }
}
