use clap::Args;
use planefix::geometry::{BBox, GridSpec, Point};
use planefix::lamination::Angle;
use planefix::poly::Poly;
use planefix::polydyn::{
    filled_julia_raster, fixed_rays_at, impression_diameter_bound, pointdyn_harness, puzzle_piece_check, trace_ray,
    ImpressionVerdict, PointdynInstance, PointdynVerdict, PolyDynError, PuzzleOptions, PuzzlePiece, RayOptions,
    RayStatus,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::plane::draw_region;
use super::{Outcome, Status};
use crate::error::CliError;
use crate::input::{parse_point, parse_poly, read_json};
use crate::svg::{Figure, Style};
use crate::Common;

/// Raster cells across the filled Julia set drawn behind ray figures.
const BACKDROP_CELLS: usize = 160;

fn window(p: &Poly, extra: &[Point]) -> BBox {
    let d = p.degree();
    let cd = p.leading().norm();
    let low: f64 = p.coeffs()[..d].iter().map(|c| c.norm()).sum::<f64>() / cd;
    let r = extra.iter().fold(1.0f64.max(low.sqrt() + 1.0), |m, q| m.max(1.1 * q.norm()));
    BBox::square(Point::ORIGIN, r.min(1e3))
}

fn backdrop(fig: &mut Figure, p: &Poly, b: &BBox, iters: usize) -> Result<(), CliError> {
    let spec = GridSpec::covering(b, b.diameter() / BACKDROP_CELLS as f64, 0)?;
    fig.cells(filled_julia_raster(p, spec, iters), "#e0e0e0");
    Ok(())
}

fn clip(pts: &[Point], b: &BBox) -> Vec<Point> {
    let first = pts.iter().position(|q| b.contains(*q)).unwrap_or(pts.len());
    pts[first.saturating_sub(1)..].to_vec()
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RayArgs {
    /// Polynomial `poly:[c0,c1,...]` or a JSON file.
    #[arg(long)]
    pub map: String,
    /// Rational angle `p/q`.
    #[arg(long)]
    pub angle: String,
    /// Equipotential levels traced.
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    /// Starting radius after normalization.
    #[arg(long, default_value_t = 1e4)]
    pub r0: f64,
    /// Also estimate impression diameters down to this level.
    #[arg(long)]
    pub impression: Option<usize>,
    /// Also list the rays landing at this fixed point `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub fixed_at: Option<String>,
    /// Largest denominator for `--fixed-at`.
    #[arg(long, default_value_t = 8)]
    pub qmax: i64,
    #[command(flatten)]
    pub common: Common,
}

pub fn ray(a: &RayArgs) -> Result<Outcome, CliError> {
    let tol = a.common.tolerances()?;
    let p = parse_poly(&a.map)?;
    let theta: Angle = a.angle.parse()?;
    let opts = RayOptions { depth: a.depth, r0: a.r0, land: tol.land, ..RayOptions::default() };
    let r = trace_ray(&p, theta, &opts)?;
    let mut status = match r.status {
        RayStatus::Landed { .. } => Status::Holds,
        _ => Status::NoConvergence,
    };
    let imp = match a.impression {
        Some(k) => Some(impression_diameter_bound(&p, theta, k, 1e-3, &opts)?),
        None => None,
    };
    if imp.as_ref().is_some_and(|i| i.verdict == ImpressionVerdict::Unresolved) {
        status = Status::NoConvergence;
    }
    let fixed = match &a.fixed_at {
        Some(s) => Some(fixed_rays_at(&p, parse_point(s)?, a.qmax, &opts, &tol)?),
        None => None,
    };
    if fixed.as_ref().is_some_and(|f| !f.permutation) {
        status = Status::Fails;
    }

    let b = window(&p, &[r.endpoint()]);
    let mut fig = Figure::new(format!("external ray {theta}")).with_window(b);
    backdrop(&mut fig, &p, &b, 200)?;
    fig.path(&clip(&r.points, &b), false, Style::External);
    fig.marker(r.endpoint(), "#d62728", Some(theta.to_string()));
    let result = json!({
        "landing": r.landing(),
        "ray": r,
        "impression": imp,
        "fixed_rays": fixed,
        "connectedness_warning": planefix::polydyn::connectedness_warning(&p),
    });
    Outcome::new(&result, status, fig)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PuzzleArgs {
    /// Polynomial `poly:[c0,c1,...]` or a JSON file.
    #[arg(long)]
    pub map: String,
    /// Puzzle piece JSON (`x`, `exits` with `e` and `angles`).
    #[arg(long, required_unless_present = "pointdyn")]
    pub piece: Option<String>,
    /// Point-degeneracy instance JSON (`x`, `case`, optional `exits` and `qmax`).
    #[arg(long, conflicts_with = "piece")]
    pub pointdyn: Option<String>,
    /// Equipotential levels traced per ray.
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    /// Escape-time iterations for the filled Julia set.
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn puzzle(a: &PuzzleArgs) -> Result<Outcome, CliError> {
    let tol = a.common.tolerances()?;
    let p = parse_poly(&a.map)?;
    let opts = PuzzleOptions {
        grid: a.common.grid,
        iters: a.iters,
        rays: RayOptions { depth: a.depth, land: tol.land, ..RayOptions::default() },
    };
    if let Some(path) = &a.pointdyn {
        let inst: PointdynInstance = read_json(path)?;
        let rep = pointdyn_harness(&p, &inst, &opts, &tol)?;
        let status = match rep.verdict {
            PointdynVerdict::Consistent | PointdynVerdict::NotApplicable { .. } => Status::Holds,
            PointdynVerdict::Inconclusive { .. } => Status::NoConvergence,
            PointdynVerdict::HypothesisViolated { .. } | PointdynVerdict::ContradictionAlarm => Status::Fails,
        };
        let b = window(&p, &[]);
        let mut fig = Figure::new("point-degeneracy harness").with_window(b);
        backdrop(&mut fig, &p, &b, a.iters)?;
        draw_region(&mut fig, &inst.x, Style::Region);
        for f in &rep.fixed_points {
            fig.marker(f.location, "#d62728", Some(format!("{:?}", f.kind).to_lowercase()));
        }
        return Outcome::new(&rep, status, fig);
    }
    let path = a.piece.as_ref().ok_or_else(|| CliError::input("need --piece or --pointdyn"))?;
    let piece: PuzzlePiece = read_json(path)?;
    let b = window(&p, &[]);
    let mut fig = Figure::new("puzzle piece").with_window(b);
    backdrop(&mut fig, &p, &b, a.iters)?;
    draw_region(&mut fig, &piece.x, Style::Region);
    for e in &piece.exits {
        draw_region(&mut fig, &e.e, Style::Exit);
    }
    match puzzle_piece_check(&p, &piece, &opts) {
        Ok(rep) => {
            for rs in &rep.rays {
                for r in rs {
                    fig.path(&clip(&r.points, &b), false, Style::External);
                    fig.marker(r.endpoint(), "#d62728", Some(r.angle.to_string()));
                }
            }
            Outcome::new(&json!({ "passed": true, "report": rep }), Status::Holds, fig)
        }
        Err(PolyDynError::ConditionFailed(k, msg)) => {
            Outcome::new(&json!({ "passed": false, "condition": k, "message": msg }), Status::Fails, fig)
        }
        Err(PolyDynError::RayUnresolved(t)) => {
            Outcome::new(&json!({ "passed": false, "unresolved_ray": t }), Status::NoConvergence, fig)
        }
        Err(e) => Err(e.into()),
    }
}
