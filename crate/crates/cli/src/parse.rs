//! Text forms of points, point lists and schedules.

use hilbert_core::geometry::{shapes, BodyDescriptor, ConvexBody, Point};
use hilbert_core::lab::{geometric_schedule, linear_schedule};

use crate::CliError;

/// `x,y,...`
pub fn point(text: &str) -> Result<Point, CliError> {
    let coords = text
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| CliError::Input(format!("bad coordinate {c:?}: {e}"))))
        .collect::<Result<Vec<f64>, _>>()?;
    if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Input(format!("bad point {text:?}")));
    }
    Ok(Point::from_vec(coords))
}

/// `x,y;x,y;...`
pub fn points(text: &str) -> Result<Vec<Point>, CliError> {
    text.split(';').filter(|s| !s.trim().is_empty()).map(point).collect()
}

/// `1,2,4,...`, `geometric:K` for `{1, ..., 2^K}`, or `linear:LO:HI:N`.
pub fn schedule(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Input(format!("bad schedule {text:?}"));
    if let Some(k) = text.strip_prefix("geometric:") {
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k > 60 {
            return Err(bad());
        }
        return Ok(geometric_schedule(k));
    }
    if let Some(rest) = text.strip_prefix("linear:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        return Ok(linear_schedule(lo, hi, n));
    }
    text.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// Stock bodies addressable as `builtin:NAME`.
pub fn builtin(name: &str) -> Option<ConvexBody> {
    Some(match name {
        "square" => shapes::square(),
        "disk" => shapes::unit_disk(),
        "cube" => shapes::cube(3),
        "ball" => shapes::unit_ball(3),
        "simplex2" => shapes::standard_simplex(2),
        "simplex3" => shapes::standard_simplex(3),
        "hexagon" => shapes::regular_polygon(6, 1.0).ok()?,
        _ => return None,
    })
}

/// Reads a body descriptor file, or a `builtin:` name.
pub fn body(source: &str) -> Result<ConvexBody, CliError> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return builtin(name).ok_or_else(|| CliError::Input(format!("unknown builtin body {name:?}")));
    }
    let text = std::fs::read_to_string(source).map_err(|e| CliError::Input(format!("cannot read {source}: {e}")))?;
    let desc = BodyDescriptor::from_json(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))?;
    Ok(desc.build()?)
}
