//! Parsing of the compact command-line forms for maps, curves and regions.
//! Anything that is not a recognized short form is read as a JSON file.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use planefix::geometry::{PlaneCurve, Point, Region};
use planefix::map::PlaneMap;
use planefix::poly::Poly;
use serde::de::DeserializeOwned;

use crate::error::CliError;

/// Samples per axis for the grid-sampled maps.
const GRID_MAP_SAMPLES: usize = 257;
const CIRCLE_VERTICES: usize = 256;

pub fn read_json<T: DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(Path::new(path)).map_err(|e| CliError::input(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{path}: {e}")))
}

fn numbers(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::input(format!("{what}: expected {n} comma-separated numbers, got '{s}'")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::input(format!("{what}: expected {n} finite numbers, got '{s}'")));
    }
    Ok(v)
}

/// `body[@cx,cy]`
fn split_center(s: &str) -> Result<(&str, Point), CliError> {
    match s.split_once('@') {
        Some((b, c)) => {
            let v = numbers(c, 2, "center")?;
            Ok((b, Point::new(v[0], v[1])))
        }
        None => Ok((s, Point::ORIGIN)),
    }
}

pub fn parse_point(s: &str) -> Result<Point, CliError> {
    let v = numbers(s, 2, "point")?;
    Ok(Point::new(v[0], v[1]))
}

/// `poly:[c0, c1, ...]` (reals or `[re, im]` pairs), `conj:r`, `modsq:r`, or a JSON file.
pub fn parse_map(s: &str) -> Result<PlaneMap, CliError> {
    if let Some(body) = s.strip_prefix("poly:") {
        let p: Poly = serde_json::from_str(body).map_err(|e| CliError::input(format!("map '{s}': {e}")))?;
        return Ok(PlaneMap::poly(p));
    }
    if let Some(body) = s.strip_prefix("conj:") {
        let r = numbers(body, 1, "conj radius")?[0];
        return Ok(PlaneMap::conjugation(r, GRID_MAP_SAMPLES));
    }
    if let Some(body) = s.strip_prefix("modsq:") {
        let r = numbers(body, 1, "modsq radius")?[0];
        return Ok(PlaneMap::modulus_squared(r, GRID_MAP_SAMPLES));
    }
    read_json(s)
}

pub fn parse_poly(s: &str) -> Result<Poly, CliError> {
    match parse_map(s)? {
        PlaneMap::Polynomial(p) => Ok(p),
        PlaneMap::Grid(_) => Err(CliError::input(format!("map '{s}' is not a polynomial"))),
    }
}

fn vertex_list(body: &str, what: &str) -> Result<Vec<Point>, CliError> {
    serde_json::from_str(body).map_err(|e| CliError::input(format!("{what}: {e}")))
}

/// `circle:r[@c]`, `arc:r,deg0,deg1[@c]`, `segment:x0,y0,x1,y1`,
/// `polyline:[[x,y],...]`, `polygon:[[x,y],...]`, or a JSON file.
pub fn parse_curve(s: &str) -> Result<PlaneCurve, CliError> {
    if let Some(body) = s.strip_prefix("circle:") {
        let (b, c) = split_center(body)?;
        let r = numbers(b, 1, "circle radius")?[0];
        if r <= 0.0 {
            return Err(CliError::input("circle radius must be positive"));
        }
        return Ok(PlaneCurve::circle(c, r, CIRCLE_VERTICES));
    }
    if let Some(body) = s.strip_prefix("arc:") {
        let (b, c) = split_center(body)?;
        let v = numbers(b, 3, "arc")?;
        let (t0, t1) = (v[1] * PI / 180.0, v[2] * PI / 180.0);
        let n = ((t1 - t0).abs() / (2.0 * PI) * CIRCLE_VERTICES as f64).ceil() as usize;
        return Ok(PlaneCurve::circular_arc(c, v[0], t0, t1, n.max(8)));
    }
    if let Some(body) = s.strip_prefix("segment:") {
        let v = numbers(body, 4, "segment")?;
        return Ok(PlaneCurve::segment(Point::new(v[0], v[1]), Point::new(v[2], v[3])));
    }
    if let Some(body) = s.strip_prefix("polyline:") {
        return Ok(PlaneCurve::open(vertex_list(body, "polyline")?)?);
    }
    if let Some(body) = s.strip_prefix("polygon:") {
        return Ok(PlaneCurve::closed(vertex_list(body, "polygon")?)?);
    }
    read_json(s)
}

/// `hull` (the curve with its inside), `point:x,y`, `disk:r[@c]`, any curve
/// form (as a curve), or a JSON region file.
pub fn parse_region(s: &str, curve: Option<&PlaneCurve>) -> Result<Region, CliError> {
    if s == "hull" {
        let c = curve.ok_or_else(|| CliError::input("--x hull needs --curve"))?;
        return Ok(Region::filled(c.clone())?);
    }
    if let Some(body) = s.strip_prefix("point:") {
        return Ok(Region::Point(parse_point(body)?));
    }
    if let Some(body) = s.strip_prefix("disk:") {
        let (b, c) = split_center(body)?;
        let r = numbers(b, 1, "disk radius")?[0];
        return Ok(Region::filled(PlaneCurve::circle(c, r, CIRCLE_VERTICES))?);
    }
    let short = ["circle:", "arc:", "segment:", "polyline:", "polygon:"];
    if short.iter().any(|p| s.starts_with(p)) {
        return Ok(Region::Curve(parse_curve(s)?));
    }
    let r: Region = read_json(s)?;
    r.validate()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_forms() {
        assert!(matches!(parse_map("poly:[0,0,1]").unwrap(), PlaneMap::Polynomial(_)));
        assert!(parse_map("poly:[[0,1],[2,0]]").is_ok());
        assert!(parse_map("poly:[0,").is_err());
        let c = parse_curve("circle:0.9@1,2").unwrap();
        assert!(c.is_closed());
        assert!((c.vertices[0].dist(Point::new(1.9, 2.0))).abs() < 1e-12);
        let a = parse_curve("arc:0.5,0,180").unwrap();
        assert!(a.last().dist(Point::new(-0.5, 0.0)) < 1e-12);
        assert!(matches!(parse_region("hull", Some(&c)).unwrap(), Region::Filled(_)));
        assert!(matches!(parse_region("segment:-1,0,1,0", None).unwrap(), Region::Curve(_)));
        assert!(parse_region("hull", None).is_err());
        assert!(parse_curve("nonexistent.json").is_err());
    }
}
