use serde::{Deserialize, Serialize};

use super::{image_samples, polyline_curve_distance, ImageSample, IndexError};
use crate::geometry::{
    build_junction, vector_degree, DegreeError, GeomError, Junction, PlaneCurve, Point, RayLabel, Region,
};
use crate::map::PlaneMap;
use crate::Tolerances;

/// A meeting of the image of the arc with one of the junction rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    /// Arclength along the arc where the image meets the ray.
    pub s: f64,
    pub image: Point,
    pub ray: RayLabel,
}

/// A counted transition between consecutive hits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub s_from: f64,
    pub s_to: f64,
    pub from: RayLabel,
    pub to: RayLabel,
    pub sign: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub link: PlaneCurve,
    pub junction: Junction,
    pub hits: Vec<Hit>,
    pub crossings: Vec<Crossing>,
    pub total: i64,
    /// Whether the junction vertex had to be moved off the image of an endpoint.
    pub perturbed: bool,
    /// Absolute distance tolerance used for membership and disjointness tests.
    pub tolerance: f64,
}

/// Heading pointing away from `X` at arclength `s`, for an arc running
/// counterclockwise around `X` (so `X` is on its left).
pub fn outward_heading(a: &PlaneCurve, s: f64) -> f64 {
    let t = a.tangent_at(s);
    Point::new(t.y, -t.x).angle()
}

fn abs_tol(a: &PlaneCurve, x: &Region, tol: &Tolerances) -> f64 {
    tol.geom_at(a.diameter().max(x.diameter()))
}

/// Membership tolerance for `X`: raster regions are only known to a cell.
fn member_tol(x: &Region, eps: f64) -> f64 {
    match x {
        Region::Raster(r) => eps.max(r.spec.h * 1e-6),
        _ => eps,
    }
}

fn check_preconditions(
    f: &PlaneMap,
    a: &PlaneCurve,
    x: &Region,
    eps: f64,
    max_chord: f64,
) -> Result<Vec<ImageSample>, IndexError> {
    if a.is_closed() {
        return Err(IndexError::PreconditionViolated("bumping arc must be open".into()));
    }
    let mt = member_tol(x, eps);
    let (p, q) = (a.first(), a.last());
    if !x.contains(p, mt) || !x.contains(q, mt) {
        return Err(IndexError::PreconditionViolated("arc endpoints must lie in X".into()));
    }
    if !x.contains(f.eval(p)?, mt) || !x.contains(f.eval(q)?, mt) {
        return Err(IndexError::PreconditionViolated("images of the arc endpoints must lie in X".into()));
    }
    let samples = image_samples(f, a, max_chord)?;
    let pts: Vec<Point> = samples.iter().map(|s| s.fz).collect();
    if polyline_curve_distance(&pts, a) <= eps {
        return Err(IndexError::PreconditionViolated("image of the arc meets the arc".into()));
    }
    Ok(samples)
}

fn endpoint_images_clear(f: &PlaneMap, a: &PlaneCurve, j: &Junction, eps: f64) -> Result<bool, IndexError> {
    Ok(j.distance(f.eval(a.first())?) > eps && j.distance(f.eval(a.last())?) > eps)
}

/// Moves the junction vertex along the arc in steps of `10 eps` until the
/// images of the endpoints are off the junction.
fn perturb_junction(f: &PlaneMap, a: &PlaneCurve, x: &Region, j: &Junction, eps: f64) -> Result<Junction, IndexError> {
    let s0 = a.project(j.vertex);
    let obstacles = [x.clone(), Region::Curve(a.clone())];
    for k in [1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 5.0, -5.0] {
        let v = a.point_at(s0 + k * 10.0 * eps);
        if let Ok(jj) = build_junction(v, j.heading, &obstacles, eps) {
            if endpoint_images_clear(f, a, &jj, eps)? {
                return Ok(jj);
            }
        }
    }
    Err(IndexError::JunctionTouchesImageOfEndpoints)
}

/// Variation of `f` on the bumping arc `a` of `x` with respect to `j`:
/// walking the image of `a` from its first to its last point, each `R+`
/// meeting directly followed by an `Ri` meeting counts `+1` and each `Ri`
/// meeting directly followed by an `R+` meeting counts `-1`.
pub fn variation(
    f: &PlaneMap,
    a: &PlaneCurve,
    x: &Region,
    j: &Junction,
    tol: &Tolerances,
) -> Result<VariationReport, IndexError> {
    let eps = abs_tol(a, x, tol);
    if a.distance_to(j.vertex) > eps.max(1e-12) {
        return Err(IndexError::PreconditionViolated("junction vertex must lie on the arc".into()));
    }
    let mut junction = j.clone();
    let mut perturbed = false;
    if !endpoint_images_clear(f, a, &junction, eps)? {
        junction = perturb_junction(f, a, x, j, eps)?;
        perturbed = true;
    }
    let max_chord = (junction.feature.min(a.diameter())) / 4.0;
    let samples = check_preconditions(f, a, x, eps, max_chord)?;

    let mut hits = Vec::new();
    for w in samples.windows(2) {
        let (p, q) = (w[0], w[1]);
        for (t, ray) in junction.hits(p.fz, q.fz, eps) {
            hits.push(Hit { s: p.s + t * (q.s - p.s), image: p.fz.lerp(q.fz, t), ray });
        }
    }
    let mut crossings = Vec::new();
    for w in hits.windows(2) {
        let sign = match (w[0].ray, w[1].ray) {
            (RayLabel::Plus, RayLabel::I) => 1,
            (RayLabel::I, RayLabel::Plus) => -1,
            _ => continue,
        };
        crossings.push(Crossing { s_from: w[0].s, s_to: w[1].s, from: w[0].ray, to: w[1].ray, sign });
    }
    let total = crossings.iter().map(|c| c.sign).sum();
    Ok(VariationReport { link: a.clone(), junction, hits, crossings, total, perturbed, tolerance: eps })
}

const VERTEX_FRACTIONS: [f64; 9] = [0.5, 0.4, 0.6, 0.3, 0.7, 0.2, 0.8, 0.1, 0.9];

/// Junction on `a` built with `X` and `a` as obstacles, tried at several
/// positions along the arc with the outward heading.
pub(crate) fn auto_junction(a: &PlaneCurve, x: &Region, eps: f64) -> Result<Junction, GeomError> {
    let len = a.length();
    let obstacles = [x.clone(), Region::Curve(a.clone())];
    let mut last = GeomError::NoEscape;
    for frac in VERTEX_FRACTIONS {
        let s = frac * len;
        match build_junction(a.point_at(s), outward_heading(a, s), &obstacles, eps) {
            Ok(j) => return Ok(j),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// [`variation`] with a junction chosen automatically.
pub fn variation_auto(
    f: &PlaneMap,
    a: &PlaneCurve,
    x: &Region,
    tol: &Tolerances,
) -> Result<VariationReport, IndexError> {
    let eps = abs_tol(a, x, tol);
    let j = auto_junction(a, x, eps)?;
    variation(f, a, x, &j, tol)
}

fn sample_inside(x: &Region, p: Point, q: Point, eps: f64) -> bool {
    (0..=64).all(|k| x.contains(p.lerp(q, k as f64 / 64.0), eps))
}

/// Candidate return paths through `X` from the last point of `a` back to
/// its first point, as lists of intermediate vertices.
pub fn close_arc(a: &PlaneCurve, x: &Region, eps: f64) -> Vec<Vec<Point>> {
    let (pa, pb) = (a.first(), a.last());
    let mut out: Vec<Vec<Point>> = Vec::new();
    let inner = |c: &PlaneCurve| -> Vec<Point> {
        let v = &c.vertices;
        if v.len() <= 2 {
            Vec::new()
        } else {
            v[1..v.len() - 1].to_vec()
        }
    };
    match x {
        Region::Point(_) => out.push(Vec::new()),
        Region::Filled(c) | Region::Curve(c) => {
            if matches!(x, Region::Filled(_)) && sample_inside(x, pb, pa, eps) {
                out.push(Vec::new());
            }
            let (sb, sa) = (c.project(pb), c.project(pa));
            if c.is_closed() {
                out.push(inner(&c.subarc(sb, sa)));
                out.push(inner(&c.subarc(sa, sb).reversed()));
            } else if sb <= sa {
                out.push(inner(&c.subarc(sb, sa)));
            } else {
                out.push(inner(&c.subarc(sa, sb).reversed()));
            }
        }
        Region::Raster(r) => {
            let cell = |p: Point| -> Option<(usize, usize)> {
                match r.spec.cell_of(p) {
                    Some(c) if r.get(c.0, c.1) => Some(c),
                    _ => r.nearest_occupied(p).map(|(c, _)| c),
                }
            };
            if let (Some(cb), Some(ca)) = (cell(pb), cell(pa)) {
                if let Some(path) = r.path(cb, ca) {
                    out.push(path.into_iter().map(|(i, j)| r.spec.center(i, j)).collect());
                }
            }
        }
    }
    out
}

/// Winding of the image of `a` closed up through `X` about the junction
/// vertex, using a return path whose image avoids `j`.
pub fn variation_oracle_with(
    f: &PlaneMap,
    a: &PlaneCurve,
    x: &Region,
    j: &Junction,
    tol: &Tolerances,
) -> Result<i64, IndexError> {
    let eps = abs_tol(a, x, tol);
    let max_chord = (j.feature.min(a.diameter())) / 4.0;
    check_preconditions(f, a, x, eps, max_chord)?;
    let v = j.vertex;
    for inner in close_arc(a, x, eps) {
        let mut ret = vec![a.last()];
        ret.extend(inner.iter().copied());
        ret.push(a.first());
        ret.dedup();
        if ret.len() >= 2 {
            let path = PlaneCurve::open(ret.clone())?;
            let samples = image_samples(f, &path, max_chord)?;
            let touches = samples.iter().any(|s| j.distance(s.fz) <= eps)
                || samples.windows(2).any(|w| !j.hits(w[0].fz, w[1].fz, eps).is_empty());
            if touches {
                continue;
            }
        }
        let mut verts = a.vertices.clone();
        verts.extend(inner);
        let s = PlaneCurve::closed(verts)?;
        return vector_degree(&s, |z| f.eval(z).map(|w| w - v), eps).map_err(|e| match e {
            DegreeError::Vanishes(p) => IndexError::ImageHitsBasepoint(p),
            DegreeError::Eval(m) => IndexError::Map(m),
        });
    }
    Err(IndexError::CannotCloseArc)
}

/// Independent computation of the variation through a closed curve's winding.
pub fn variation_oracle(f: &PlaneMap, a: &PlaneCurve, x: &Region, tol: &Tolerances) -> Result<i64, IndexError> {
    let eps = abs_tol(a, x, tol);
    let j = auto_junction(a, x, eps)?;
    variation_oracle_with(f, a, x, &j, tol)
}
