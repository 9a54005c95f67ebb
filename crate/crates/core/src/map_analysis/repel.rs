use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::geometry::segment::{point_segment_distance, project_on_segment};
use crate::geometry::{vector_degree, PlaneCurve, Point, Region};
use crate::index_var::{variation_auto, variation_oracle, VariationReport};
use crate::map::PlaneMap;
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepelOptions {
    /// Radius of the closed disk `D` around the fixed point. The probe
    /// neighborhood `U` on which injectivity and `f(U ∩ X) ⊂ X` are checked is
    /// the same disk.
    pub disk_radius: f64,
    /// Samples on the circle bounding `D`.
    pub circle_samples: usize,
}

impl Default for RepelOptions {
    fn default() -> Self {
        RepelOptions { disk_radius: 0.5, circle_samples: 2048 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepelWitness {
    /// Component of `∂D \ X` met by the ray, as a counterclockwise arc.
    pub crosscut: PlaneCurve,
    pub variation: VariationReport,
    /// Winding-number computation of the same variation.
    pub oracle: i64,
    pub disk_radius: f64,
}

fn fail(k: u8, msg: impl Into<String>) -> AnalysisError {
    AnalysisError::HypothesisFailed(k, msg.into())
}

/// Position along a ray measured from its landing point (its last vertex),
/// treating the first leg as extending to infinity. Returns the position and
/// the distance from `q` to the ray.
fn ray_position(ray: &PlaneCurve, q: Point) -> (f64, f64) {
    let back = ray.reversed();
    let cum = back.cumulative_lengths();
    let n = back.vertices.len();
    let mut best = (f64::INFINITY, 0.0);
    for (i, (w, &start)) in back.vertices.windows(2).zip(&cum).enumerate() {
        let (a, b) = (w[0], w[1]);
        let (d, s) = if i == n - 2 {
            // unbounded far leg
            let dir = b - a;
            let len = dir.norm();
            let t = ((q - a).dot(dir) / (len * len)).max(0.0);
            (q.dist(a + dir * t), start + t * len)
        } else {
            let t = project_on_segment(q, a, b);
            (point_segment_distance(q, a, b), start + t * a.dist(b))
        };
        if d < best.0 {
            best = (d, s);
        }
    }
    (best.1, best.0)
}

/// Looks for the crosscut of the repelling-outside criterion at the fixed
/// point `p`: `f` injective near `p` with `f(U ∩ X) ⊂ X` (1); `∂D \ X` with
/// at least two components and `f(∂D) ∩ D = ∅` (2); `f` moving the points
/// of the ray `ray` (ending at `p`) away from `p` along the ray (3).
pub fn repels_outside_witness(
    f: &PlaneMap,
    x: &Region,
    p: Point,
    ray: &PlaneCurve,
    opts: &RepelOptions,
    tol: &Tolerances,
) -> Result<RepelWitness, AnalysisError> {
    let r = opts.disk_radius;
    let eps = tol.geom_at(r.max(x.diameter()));
    if f.eval(p)?.dist(p) > tol.fix_at(r) * 1e3 {
        return Err(AnalysisError::ConfigInvalid("p is not a fixed point".into()));
    }
    if ray.last().dist(p) > eps {
        return Err(AnalysisError::ConfigInvalid("the ray must land at p".into()));
    }
    let disk = PlaneCurve::circle(p, r, opts.circle_samples.max(16));
    let fp = f.eval(p)?;

    // (1) local degree one on U and f(U ∩ X) ⊂ X
    let deg = vector_degree(&disk, |z| f.eval(z).map(|v| v - fp), eps)
        .map_err(|_| fail(1, "image of the probe circle passes through f(p)"))?;
    if deg != 1 {
        return Err(fail(1, format!("f has local degree {deg} on the probe disk")));
    }
    let spacing = r / 64.0;
    for q in x.sample(spacing) {
        if q.dist(p) <= r && !x.contains(f.eval(q)?, eps) {
            return Err(fail(1, "f(U ∩ X) leaves X"));
        }
    }

    // (2) ∂D \ X has at least two components
    let n = opts.circle_samples.max(16);
    let angle = |k: usize| TAU * k as f64 / n as f64;
    let on_circle = |t: f64| p + Point::polar(r, t);
    let in_x: Vec<bool> = (0..n).map(|k| x.contains(on_circle(angle(k)), eps)).collect();
    let mut runs: Vec<(usize, usize)> = Vec::new(); // [start, end) of outside runs, cyclic
    if let Some(first_in) = in_x.iter().position(|&b| b) {
        let mut k = first_in;
        for _ in 0..n {
            let next = (k + 1) % n;
            if in_x[k] && !in_x[next] {
                let start = next;
                let mut end = start;
                while !in_x[end % n] {
                    end += 1;
                }
                runs.push((start, end));
            }
            k = next;
        }
    }
    let components = if in_x.contains(&true) { runs.len() } else { 1 };
    if components < 2 {
        return Err(fail(2, format!("∂D \\ X has {components} component(s)")));
    }

    // (3) f maps the ray into itself, moving points away from p
    let back = ray.reversed();
    let len = back.length();
    let mut probes: Vec<f64> = (1..=64).map(|j| len * j as f64 / 64.0).collect();
    probes.extend((1..=12).map(|k| r * 0.5f64.powi(k)));
    for s in probes.into_iter().filter(|&s| s < len) {
        let q = back.point_at(s);
        let (s0, _) = ray_position(ray, q);
        let (s1, d) = ray_position(ray, f.eval(q)?);
        let scale = tol.geom_at(q.dist(p).max(1.0)) * 1e3;
        if d > scale || s1 <= s0 {
            return Err(fail(3, format!("the ray point at distance {s:.3e} from p is not pushed outward")));
        }
    }

    // (2, continued) f(∂D) ∩ D = ∅
    for k in 0..n {
        let img = f.eval(on_circle(angle(k)))?;
        if img.dist(p) <= r + eps {
            return Err(fail(2, "f(∂D) meets D"));
        }
    }

    // the outside run met by the ray
    let Some(q) = first_exit(&back, p, r) else {
        return Err(fail(3, "the ray does not leave D"));
    };
    let k_hit = ((q - p).angle().rem_euclid(TAU) / TAU * n as f64).floor() as usize % n;
    let in_run = |k: usize, (s, e): (usize, usize)| (s..e).any(|j| j % n == k);
    let (start, end) = runs
        .iter()
        .copied()
        .find(|&run| in_run(k_hit, run) || in_run((k_hit + 1) % n, run))
        .ok_or_else(|| fail(3, "the ray meets ∂D inside X"))?;
    // endpoints are pulled well inside the membership tolerance so that
    // their images still register as points of X
    let tight = 1e-3 * eps;
    let boundary = |inside: f64, outside: f64| -> f64 {
        let (mut a, mut b) = (inside, outside);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if x.contains(on_circle(m), tight) {
                a = m;
            } else {
                b = m;
            }
        }
        a
    };
    let t0 = boundary(angle(start) - TAU / n as f64, angle(start));
    let t1 = boundary(angle(end), angle(end) - TAU / n as f64);
    let crosscut = PlaneCurve::circular_arc(p, r, t0, t1, (end - start + 1).max(2));
    let variation = variation_auto(f, &crosscut, x, tol)?;
    let oracle = variation_oracle(f, &crosscut, x, tol)?;
    Ok(RepelWitness { crosscut, variation, oracle, disk_radius: r })
}

/// First point where the polyline, walked from its start inside the disk
/// of radius `r` about `p`, reaches the circle.
fn first_exit(path: &PlaneCurve, p: Point, r: f64) -> Option<Point> {
    for (a, b) in path.segments() {
        if a.dist(p) <= r && b.dist(p) > r {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..80 {
                let m = 0.5 * (lo + hi);
                if a.lerp(b, m).dist(p) <= r {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            return Some(a.lerp(b, 0.5 * (lo + hi)));
        }
    }
    None
}
