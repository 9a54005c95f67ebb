use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::{GeomError, PlaneCurve, Point};

const MAX_DEPTH: u32 = 52;
const INITIAL_SPLITS: usize = 4;

/// Failure of [`vector_degree`].
#[derive(Debug, Clone, PartialEq)]
pub enum DegreeError<E> {
    /// The field came within `min_norm` of zero at this curve point.
    Vanishes(Point),
    /// Evaluating the field failed.
    Eval(E),
}

fn wrap(d: f64) -> f64 {
    let mut d = d % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

/// Degree of the direction of `field` along a closed curve.
///
/// Each segment is bisected until consecutive samples of the field differ
/// in angle by less than a quarter turn, so the accumulated total is an
/// exact multiple of a full turn.
pub fn vector_degree<E>(
    curve: &PlaneCurve,
    field: impl Fn(Point) -> Result<Point, E>,
    min_norm: f64,
) -> Result<i64, DegreeError<E>> {
    let eval = |p: Point| -> Result<Point, DegreeError<E>> {
        let v = field(p).map_err(DegreeError::Eval)?;
        let norm = v.norm();
        if norm.is_nan() || norm <= min_norm {
            return Err(DegreeError::Vanishes(p));
        }
        Ok(v)
    };
    let mut total = 0.0;
    for (a, b) in curve.segments() {
        let mut prev_p = a;
        let mut prev_v = eval(a)?;
        for k in 1..=INITIAL_SPLITS {
            let p = a.lerp(b, k as f64 / INITIAL_SPLITS as f64);
            let v = eval(p)?;
            total += sweep(&eval, prev_p, prev_v, p, v, 0)?;
            prev_p = p;
            prev_v = v;
        }
    }
    let turns = total / TAU;
    Ok(turns.round() as i64)
}

fn sweep<E>(
    eval: &impl Fn(Point) -> Result<Point, DegreeError<E>>,
    p0: Point,
    v0: Point,
    p1: Point,
    v1: Point,
    depth: u32,
) -> Result<f64, DegreeError<E>> {
    let d = wrap(v1.angle() - v0.angle());
    if d.abs() < FRAC_PI_2 {
        return Ok(d);
    }
    if depth >= MAX_DEPTH {
        // The field turns by a quarter turn over an interval too short to
        // resolve: it passes (numerically) through zero.
        return Err(DegreeError::Vanishes(p0.lerp(p1, 0.5)));
    }
    let pm = p0.lerp(p1, 0.5);
    let vm = eval(pm)?;
    Ok(sweep(eval, p0, v0, pm, vm, depth + 1)? + sweep(eval, pm, vm, p1, v1, depth + 1)?)
}

/// Winding number of a closed curve about `w`.
///
/// `eps` is the absolute distance below which `w` counts as lying on the curve.
pub fn winding_number(curve: &PlaneCurve, w: Point, eps: f64) -> Result<i64, GeomError> {
    let distance = curve.distance_to(w);
    if distance <= eps {
        return Err(GeomError::PointOnCurve { distance });
    }
    // The angle a segment subtends from an off-curve point is below a half
    // turn, so one quarter-turn bisection pass is always enough here.
    vector_degree(curve, |p| Ok::<_, ()>(p - w), 0.0).map_err(|_| GeomError::PointOnCurve { distance })
}

/// Whether `p` lies in the topological hull of a simple closed curve.
pub fn in_hull(curve: &PlaneCurve, p: Point, eps: f64) -> Result<bool, GeomError> {
    if let Some((i, j)) = curve.first_self_intersection() {
        return Err(GeomError::NotSimple(i, j));
    }
    if curve.distance_to(p) <= eps {
        return Ok(true);
    }
    Ok(winding_number(curve, p, eps)? != 0)
}

/// Even-odd containment without simplicity checks; used by rasterization.
pub(crate) fn crossing_parity(vertices: &[Point], p: Point) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
