use clap::Args;
use planefix::geometry::{BBox, PlaneCurve, Point, Region};
use planefix::index_var::{fixed_point_index, fmot_verify, map_degree, variation_auto, variation_oracle};
use planefix::map::PlaneMap;
use planefix::map_analysis::{locate_fixed_points, scramble_check, FixedKind, ScrambleConfig, ScrambleVerdict};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Outcome, Status};
use crate::error::CliError;
use crate::input::{parse_curve, parse_map, parse_point, parse_region, read_json};
use crate::svg::{Figure, Style};
use crate::Common;

pub fn draw_region(fig: &mut Figure, r: &Region, style: Style) {
    match r {
        Region::Filled(c) => fig.path(&c.vertices, true, style),
        Region::Curve(c) => fig.path(&c.vertices, c.is_closed(), Style::Curve),
        Region::Point(p) => fig.marker(*p, "#555555", None),
        Region::Raster(ras) => fig.cells(ras.clone(), "#bdbdbd"),
    }
}

/// Images of dense samples of a curve. Points where the map is undefined
/// are dropped.
pub fn image_of(f: &PlaneMap, c: &PlaneCurve) -> Vec<Point> {
    let h = c.diameter().max(1e-9) / 400.0;
    let mut pts: Vec<Point> = c.sample(h).into_iter().filter_map(|p| f.eval(p).ok()).collect();
    if c.is_closed() {
        if let Some(&p) = pts.first() {
            pts.push(p);
        }
    }
    pts
}

fn kind_color(k: FixedKind) -> &'static str {
    match k {
        FixedKind::Repelling => "#d62728",
        FixedKind::Attracting => "#2ca02c",
        FixedKind::Parabolic => "#9467bd",
        FixedKind::NeutralOther => "#ff7f0e",
        FixedKind::Unknown => "#7f7f7f",
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct IndexArgs {
    /// Map: `poly:[c0,c1,...]`, `conj:r`, `modsq:r` or a JSON file.
    #[arg(long)]
    pub map: String,
    /// Simple closed curve: `circle:r[@cx,cy]`, `polygon:[[x,y],...]` or a JSON file.
    #[arg(long)]
    pub curve: String,
    /// Compute the degree of the map around this point instead of the fixed-point index.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

pub fn index(a: &IndexArgs) -> Result<Outcome, CliError> {
    let tol = a.common.tolerances()?;
    let f = parse_map(&a.map)?;
    let s = parse_curve(&a.curve)?;
    let result = match &a.point {
        Some(w) => json!({ "degree": map_degree(&f, &s, parse_point(w)?, &tol)? }),
        None => json!({ "index": fixed_point_index(&f, &s, &tol)? }),
    };
    let mut fig = Figure::new("fixed-point index");
    fig.path(&s.vertices, true, Style::Curve);
    fig.path(&image_of(&f, &s), false, Style::Image);
    Outcome::new(&result, Status::Holds, fig)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VariationArgs {
    /// Map: `poly:[c0,c1,...]`, `conj:r`, `modsq:r` or a JSON file.
    #[arg(long)]
    pub map: String,
    /// Bumping arc: `arc:r,deg0,deg1[@cx,cy]`, `polyline:[[x,y],...]` or a JSON file.
    #[arg(long)]
    pub curve: String,
    /// Continuum X: `segment:x0,y0,x1,y1`, `disk:r`, `point:x,y` or a JSON region file.
    #[arg(long)]
    pub x: String,
    /// Also compute the winding oracle and require agreement.
    #[arg(long)]
    #[serde(default)]
    pub oracle: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn variation(a: &VariationArgs) -> Result<Outcome, CliError> {
    let tol = a.common.tolerances()?;
    let f = parse_map(&a.map)?;
    let arc = parse_curve(&a.curve)?;
    let x = parse_region(&a.x, None)?;
    let rep = variation_auto(&f, &arc, &x, &tol)?;
    let oracle = if a.oracle { Some(variation_oracle(&f, &arc, &x, &tol)?) } else { None };
    let status = Status::from_bool(oracle.is_none_or(|o| o == rep.total));

    let mut fig = Figure::new("variation");
    draw_region(&mut fig, &x, Style::Region);
    fig.path(&arc.vertices, false, Style::Link);
    fig.path(&image_of(&f, &arc), false, Style::Image);
    let j = &rep.junction;
    let bound = 4.0 * arc.diameter().max(x.diameter());
    for (ray, style) in [(&j.ray_plus, Style::RayPlus), (&j.ray_i, Style::RayI), (&j.ray_minus, Style::RayMinus)] {
        let pts: Vec<Point> = ray.vertices.iter().copied().filter(|p| p.dist(j.vertex) <= bound).collect();
        fig.path(&pts, false, style);
    }
    for c in &rep.crossings {
        if let Some(h) = rep.hits.iter().find(|h| h.s == c.s_to) {
            let label = if c.sign > 0 { "+1" } else { "-1" };
            fig.marker(h.image, if c.sign > 0 { "#d62728" } else { "#1f77b4" }, Some(label.into()));
        }
    }
    Outcome::new(&json!({ "variation": rep.total, "oracle": oracle, "report": rep }), status, fig)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FmotArgs {
    /// Map: `poly:[c0,c1,...]`, `conj:r`, `modsq:r` or a JSON file.
    #[arg(long)]
    pub map: String,
    /// Simple closed curve S.
    #[arg(long)]
    pub curve: String,
    /// Continuum X; `hull` takes S with its inside.
    #[arg(long, default_value = "hull")]
    pub x: String,
    #[command(flatten)]
    pub common: Common,
}

pub fn fmot(a: &FmotArgs) -> Result<Outcome, CliError> {
    let tol = a.common.tolerances()?;
    let f = parse_map(&a.map)?;
    let s = parse_curve(&a.curve)?;
    let x = parse_region(&a.x, Some(&s))?;
    let rep = fmot_verify(&f, &s, &x, &tol)?;
    let mut fig = Figure::new("index and variation");
    draw_region(&mut fig, &x, Style::Region);
    fig.path(&rep.partition.curve.vertices, true, Style::Curve);
    fig.path(&image_of(&f, &rep.partition.curve), false, Style::Image);
    for l in &rep.partition.links {
        fig.path(&l.vertices, false, Style::Link);
    }
    for p in &rep.partition.points {
        fig.marker(*p, "#000000", None);
    }
    let status = Status::from_bool(rep.holds);
    Outcome::new(&rep, status, fig)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FixedArgs {
    /// Map: `poly:[c0,c1,...]`, `conj:r`, `modsq:r` or a JSON file.
    #[arg(long)]
    pub map: String,
    /// Search box `x0,y0,x1,y1`.
    #[arg(long = "box", default_value = "-2,-2,2,2", allow_hyphen_values = true)]
    pub bounds: String,
    #[command(flatten)]
    pub common: Common,
}

pub fn fixed_points(a: &FixedArgs) -> Result<Outcome, CliError> {
    let tol = a.common.tolerances()?;
    let f = parse_map(&a.map)?;
    let v: Vec<f64> =
        a.bounds.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(CliError::input)?;
    if v.len() != 4 || !(v[2] > v[0] && v[3] > v[1]) {
        return Err(CliError::input(format!("box '{}' must be x0,y0,x1,y1 with x1 > x0 and y1 > y0", a.bounds)));
    }
    let b = BBox::new(Point::new(v[0], v[1]), Point::new(v[2], v[3]));
    let recs = locate_fixed_points(&f, &b, &tol)?;
    let mut fig = Figure::new("fixed points");
    fig.path(&PlaneCurve::rectangle(&b).vertices, true, Style::Curve);
    for r in &recs {
        fig.marker(r.location, kind_color(r.kind), Some(format!("{}", r.local_index)));
    }
    Outcome::new(&json!({ "fixed_points": recs }), Status::Holds, fig)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ScrambleArgs {
    /// Map: `poly:[c0,c1,...]`, `conj:r`, `modsq:r` or a JSON file.
    #[arg(long)]
    pub map: String,
    /// JSON file with `x` and `exits` (each with `z` and `k`).
    #[arg(long)]
    pub config: String,
    #[command(flatten)]
    pub common: Common,
}

pub fn scramble(a: &ScrambleArgs) -> Result<Outcome, CliError> {
    let tol = a.common.tolerances()?;
    let f = parse_map(&a.map)?;
    let cfg: ScrambleConfig = read_json(&a.config)?;
    let rep = scramble_check(&f, &cfg, &tol)?;
    let mut fig = Figure::new("boundary scrambling");
    draw_region(&mut fig, &cfg.x, Style::Region);
    for e in &cfg.exits {
        draw_region(&mut fig, &e.z, Style::Exit);
        draw_region(&mut fig, &e.k, Style::Exit);
    }
    let status = Status::from_bool(rep.verdict != ScrambleVerdict::None);
    Outcome::new(&rep, status, fig)
}
