use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ray::{trace_normalized, Ray, RayOptions};
use super::{Normalized, PolyDynError};
use crate::geometry::{BBox, GridSpec, Point, Raster, Region};
use crate::lamination::Angle;
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitSpec {
    pub e: Region,
    pub angles: Vec<Angle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzlePiece {
    pub x: Region,
    #[serde(default)]
    pub exits: Vec<ExitSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PuzzleOptions {
    /// Raster cells across the scene.
    pub grid: usize,
    /// Escape-time iterations for the filled Julia set.
    pub iters: usize,
    pub rays: RayOptions,
}

impl Default for PuzzleOptions {
    fn default() -> Self {
        PuzzleOptions { grid: 256, iters: 200, rays: RayOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitReport {
    pub landings: Vec<(Angle, Point)>,
    /// Complementary components of `E_j` together with its rays.
    pub wedge_count: usize,
    /// Cells of the wedge containing `X \ E_j`.
    pub wedge_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuzzleReport {
    pub grid: GridSpec,
    pub exits: Vec<ExitReport>,
    /// Cells of the component `C` met by `X`.
    pub component_cells: usize,
    #[serde(skip)]
    pub wedges: Vec<Raster>,
    #[serde(skip)]
    pub rays: Vec<Vec<Ray>>,
}

/// Escape radius: outside this disk every orbit tends to infinity.
pub(crate) fn escape_radius(p: &Poly) -> f64 {
    let d = p.degree();
    let cd = p.leading().norm();
    let low: f64 = p.coeffs()[..d].iter().map(|c| c.norm()).sum::<f64>() / cd;
    (2.0 / cd.powf(1.0 / (d as f64 - 1.0))).max(1.0) + low
}

/// Cells whose center does not escape within `iters` iterates.
pub fn filled_julia_raster(p: &Poly, spec: GridSpec, iters: usize) -> Raster {
    let r = escape_radius(p);
    let cells: Vec<(usize, usize)> = (0..spec.ny).flat_map(|j| (0..spec.nx).map(move |i| (i, j))).collect();
    let inside: Vec<bool> = cells
        .par_iter()
        .map(|&(i, j)| {
            let mut z = spec.center(i, j).to_complex();
            for _ in 0..iters {
                if z.norm() > r {
                    return false;
                }
                z = p.eval(z);
            }
            true
        })
        .collect();
    let mut out = Raster::empty(spec);
    for (&(i, j), &v) in cells.iter().zip(&inside) {
        if v {
            out.set(i, j, true);
        }
    }
    out
}

fn scene_spec(piece: &PuzzlePiece, grid: usize) -> Result<GridSpec, PolyDynError> {
    let mut b = piece.x.bbox();
    for e in &piece.exits {
        b = b.union(&e.e.bbox());
    }
    let pad = 0.25 * b.diameter().max(0.5);
    let b = b.expand(pad);
    Ok(GridSpec::covering(&b, b.diameter() / grid.max(8) as f64, 2)?)
}

fn ray_barrier(spec: GridSpec, rays: &[Ray]) -> Raster {
    let mut r = Raster::empty(spec);
    let bb: BBox = spec.bbox().expand(spec.h * 4.0);
    for ray in rays {
        let mut pts: Vec<Point> = ray.points.clone();
        pts.push(ray.endpoint());
        // skip the far part of the ray, keeping one segment that enters the grid
        let first = pts.iter().position(|p| bb.contains(*p)).unwrap_or(pts.len() - 1).saturating_sub(1);
        r.mark_polyline(&pts[first..], false);
    }
    r
}

fn cells_of(r: &Raster) -> Vec<(usize, usize)> {
    r.occupied().collect()
}

/// Check the three puzzle-piece conditions on a raster scene.
pub fn puzzle_piece_check(p: &Poly, piece: &PuzzlePiece, opts: &PuzzleOptions) -> Result<PuzzleReport, PolyDynError> {
    piece.x.validate()?;
    let spec = scene_spec(piece, opts.grid)?;
    let h = spec.h;
    let eps = 2.0 * h;

    // (1)
    if !piece.x.is_non_separating(opts.grid) {
        return Err(PolyDynError::ConditionFailed(1, "X separates the plane".into()));
    }
    let erasters: Vec<Raster> = piece.exits.iter().map(|e| e.e.rasterize(spec)).collect();
    for (j, e) in piece.exits.iter().enumerate() {
        e.e.validate()?;
        if e.angles.len() < 2 {
            return Err(PolyDynError::ConditionFailed(
                1,
                format!("exit {j} has {} angles, needs at least 2", e.angles.len()),
            ));
        }
        if !e.e.is_non_separating(opts.grid) {
            return Err(PolyDynError::ConditionFailed(1, format!("exit {j} separates the plane")));
        }
        if e.e.sample(h).iter().any(|&q| !piece.x.contains(q, eps)) {
            return Err(PolyDynError::ConditionFailed(1, format!("exit {j} is not contained in X")));
        }
        for k in 0..j {
            let apart = match (&piece.exits[k].e, &e.e) {
                (Region::Point(a), Region::Point(b)) => a.dist(*b) > eps,
                _ => !erasters[k].intersects(&erasters[j]),
            };
            if !apart {
                return Err(PolyDynError::ConditionFailed(1, format!("exits {k} and {j} meet")));
            }
        }
    }

    // (2)
    let norm = Normalized::new(p)?;
    let mut rays: Vec<Vec<Ray>> = Vec::new();
    let mut reports = Vec::new();
    for (j, e) in piece.exits.iter().enumerate() {
        let rs: Vec<Ray> =
            e.angles.par_iter().map(|&a| trace_normalized(&norm, a, &opts.rays)).collect::<Result<_, _>>()?;
        let mut landings = Vec::new();
        for r in &rs {
            let x = r.landing().ok_or(PolyDynError::RayUnresolved(r.angle))?;
            if !e.e.contains(x, eps.max(opts.rays.land)) {
                return Err(PolyDynError::ConditionFailed(
                    2,
                    format!("ray {} lands at ({:.6}, {:.6}), outside exit {j}", r.angle, x.x, x.y),
                ));
            }
            landings.push((r.angle, x));
        }
        reports.push(ExitReport { landings, wedge_count: 0, wedge_cells: 0 });
        rays.push(rs);
    }

    // (3)
    let xr = piece.x.rasterize(spec);
    let mut barrier = Raster::empty(spec);
    let mut single: Vec<Raster> = Vec::new();
    for (j, rs) in rays.iter().enumerate() {
        let b = erasters[j].union(&ray_barrier(spec, rs));
        barrier = barrier.union(&b);
        single.push(b);
    }
    let near_barrier = barrier.dilate(2);
    let free = barrier.complement();
    let x_free = xr.intersection(&free);
    let comps = barrier.free_components();
    let mut hit: Vec<(usize, usize, bool)> = Vec::new(); // (component, cells, far from barrier)
    for (ci, c) in comps.iter().enumerate() {
        let meet = c.intersection(&x_free);
        let n = meet.count();
        if n > 0 {
            let far = meet.difference(&near_barrier).count() > 0;
            hit.push((ci, n, far));
        }
    }
    let genuine: Vec<_> = hit.iter().filter(|t| t.2).collect();
    if genuine.len() != 1 {
        return Err(PolyDynError::ConditionFailed(
            3,
            format!("X meets {} complementary components of the exit barriers", genuine.len()),
        ));
    }
    let c = &comps[genuine[0].0];
    let k = filled_julia_raster(p, spec, opts.iters);
    let stray = c.intersection(&k).difference(&xr.dilate(2)).difference(&near_barrier).count();
    if stray > 0 {
        return Err(PolyDynError::ConditionFailed(3, format!("{stray} cells of K in the component lie outside X")));
    }

    // wedges
    let mut wedges = Vec::new();
    for (j, b) in single.iter().enumerate() {
        let wc = b.free_components();
        let away = x_free.difference(&erasters[j].dilate(2));
        let sample = cells_of(&away);
        let w = wc
            .iter()
            .max_by_key(|w| sample.iter().filter(|&&(i, jj)| w.get(i, jj)).count())
            .cloned()
            .unwrap_or_else(|| Raster::empty(spec));
        reports[j].wedge_count = wc.len();
        reports[j].wedge_cells = w.count();
        wedges.push(w);
    }
    Ok(PuzzleReport { grid: spec, exits: reports, component_cells: c.count(), wedges, rays })
}

/// The piece cut out of `K` by the exits, as the closure of the component of
/// the barrier complement containing `seed`, intersected with `K`, plus the exits.
pub fn piece_from_seed(
    p: &Poly,
    exits: &[ExitSpec],
    seed: Point,
    scene: &BBox,
    opts: &PuzzleOptions,
) -> Result<Region, PolyDynError> {
    let spec = GridSpec::covering(scene, scene.diameter() / opts.grid.max(8) as f64, 2)?;
    let norm = Normalized::new(p)?;
    let mut barrier = Raster::empty(spec);
    for e in exits {
        let rs: Vec<Ray> =
            e.angles.par_iter().map(|&a| trace_normalized(&norm, a, &opts.rays)).collect::<Result<_, _>>()?;
        barrier = barrier.union(&e.e.rasterize(spec)).union(&ray_barrier(spec, &rs));
    }
    let comp =
        barrier.free_component_of(seed).ok_or_else(|| PolyDynError::Invalid("seed lies on an exit barrier".into()))?;
    let k = filled_julia_raster(p, spec, opts.iters);
    let mut x = comp.dilate(1).intersection(&k);
    for e in exits {
        x = x.union(&e.e.rasterize(spec));
    }
    Ok(Region::Raster(x))
}
