use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Normalized, PolyDynError};
use crate::geometry::Point;
use crate::lamination::Angle;
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayOptions {
    /// Number of equipotential levels `k` (radius `r0^(d^-k)`) traced below `r0`.
    pub depth: usize,
    pub r0: f64,
    /// Points per level.
    pub substeps: usize,
    pub newton_iters: usize,
    /// Landing threshold on the diameter of the traced tail.
    pub land: f64,
    /// Levels making up the tail.
    pub tail_levels: usize,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions { depth: 64, r0: 1e4, substeps: 4, newton_iters: 50, land: 5e-3, tail_levels: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RayStatus {
    Landed {
        point: Point,
    },
    /// The tail did not settle within the landing threshold.
    Unresolved {
        estimate: Point,
    },
    /// The tail settled but no periodic or preperiodic point of the right
    /// type was found next to it.
    EscapedTolerance {
        estimate: Point,
    },
}

/// An external ray in original coordinates. `points[i]` lies on the
/// equipotential of level `i / substeps`, starting at radius `r0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub angle: Angle,
    pub degree: usize,
    pub substeps: usize,
    pub points: Vec<Point>,
    pub status: RayStatus,
    pub tail_diameter: f64,
    /// Largest relative residual `|P(x) - x'| / max(1, |x'|)` over all pullback steps.
    pub max_residual: f64,
    pub preperiod: usize,
    pub period: usize,
}

impl Ray {
    pub fn landing(&self) -> Option<Point> {
        match self.status {
            RayStatus::Landed { point } => Some(point),
            _ => None,
        }
    }

    /// Best available endpoint estimate, landed or not.
    pub fn endpoint(&self) -> Point {
        match self.status {
            RayStatus::Landed { point }
            | RayStatus::Unresolved { estimate: point }
            | RayStatus::EscapedTolerance { estimate: point } => point,
        }
    }

    /// The part of the ray below equipotential level `k`.
    pub fn from_level(&self, k: usize) -> &[Point] {
        let i = (k * self.substeps).min(self.points.len().saturating_sub(1));
        &self.points[i..]
    }
}

/// Preperiod and period of a rational angle under `sigma_d`.
pub fn orbit_type(theta: Angle, d: u32) -> (usize, usize) {
    let mut seen = HashMap::new();
    let mut a = theta;
    let mut k = 0;
    loop {
        if let Some(&j) = seen.get(&a) {
            return (j, k - j);
        }
        seen.insert(a, k);
        a = a.sigma(d);
        k += 1;
    }
}

fn phase(a: Angle) -> Complex64 {
    Complex64::from_polar(1.0, TAU * a.to_f64())
}

/// Solve `q(z) = w` by damped Newton from `z0`.
fn newton_preimage(q: &Poly, w: Complex64, z0: Complex64, iters: usize) -> Option<Complex64> {
    let scale = w.norm().max(1.0);
    let mut z = z0;
    let (mut v, mut dv) = q.eval_with_derivative(z);
    let mut r = (v - w).norm();
    for _ in 0..iters {
        if r <= 1e-14 * scale {
            return Some(z);
        }
        if dv.norm() == 0.0 {
            return None;
        }
        let step = (v - w) / dv;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let zn = z - step * t;
            let (vn, dn) = q.eval_with_derivative(zn);
            let rn = (vn - w).norm();
            if rn < r {
                z = zn;
                v = vn;
                dv = dn;
                r = rn;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            // no further progress at working precision
            return (r <= 1e-10 * scale).then_some(z);
        }
    }
    (r <= 1e-10 * scale).then_some(z)
}

/// Newton on `Q^(l+p) - Q^l` from `z0`.
fn refine_landing(q: &Poly, z0: Complex64, l: usize, p: usize) -> Option<Complex64> {
    let f = |z: Complex64| {
        let (mut v, mut dv) = (z, Complex64::new(1.0, 0.0));
        let (mut vl, mut dl) = (v, dv);
        for k in 1..=l + p {
            let (a, b) = q.eval_with_derivative(v);
            dv *= b;
            v = a;
            if k == l {
                vl = v;
                dl = dv;
            }
        }
        if l == 0 {
            vl = z;
            dl = Complex64::new(1.0, 0.0);
        }
        (v - vl, dv - dl, ())
    };
    // success is judged by the Newton step, since F itself carries roundoff
    // amplified by the derivative of the iterate
    let mut z = z0;
    let (mut fz, mut dfz, _) = f(z);
    let zs = z0.norm().max(1.0);
    for _ in 0..100 {
        if dfz.norm() == 0.0 || !fz.norm().is_finite() {
            return (fz.norm() == 0.0).then_some(z);
        }
        let step = fz / dfz;
        if step.norm() <= 1e-13 * zs {
            return Some(z);
        }
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let zn = z - step * t;
            let (a, b, _) = f(zn);
            if a.norm() < fz.norm() {
                z = zn;
                fz = a;
                dfz = b;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (dfz.norm() > 0.0 && (fz / dfz).norm() <= 1e-9 * zs).then_some(z)
}

/// Orbits up to this length are traced in full and refined together.
const MAX_SHOOTING_ORBIT: usize = 512;

/// Newton on the orbit equations `Q(z_k) = z_(k+1)`, with `Q(z_(l+p-1)) = z_l`
/// closing the cycle, starting from the ray endpoints `z`. Each linear solve
/// back-substitutes along the orbit, which stays well conditioned for long
/// repelling cycles where the single equation `Q^(l+p)(z) = Q^l(z)` does not.
fn refine_orbit(q: &Poly, mut z: Vec<Complex64>, l: usize, p: usize) -> Option<Complex64> {
    let n = l + p;
    let next = |k: usize| if k + 1 == n { l } else { k + 1 };
    let zs = z.iter().map(|w| w.norm()).fold(1.0, f64::max);
    let mut last_step = f64::INFINITY;
    for _ in 0..60 {
        let (mut f, mut lam) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for k in 0..n {
            let (v, dv) = q.eval_with_derivative(z[k]);
            if dv.norm() == 0.0 {
                return None;
            }
            f.push(v - z[next(k)]);
            lam.push(dv);
        }
        // on the cycle, delta_k = a_k delta_l + b_k
        let (mut a, mut b) = (vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]);
        let (mut an, mut bn) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        for k in (l..n).rev() {
            a[k] = an / lam[k];
            b[k] = (bn - f[k]) / lam[k];
            (an, bn) = (a[k], b[k]);
        }
        let denom = Complex64::new(1.0, 0.0) - a[l];
        if denom.norm() < 1e-12 {
            return None;
        }
        let dl = b[l] / denom;
        let mut delta = vec![Complex64::new(0.0, 0.0); n];
        for k in l..n {
            delta[k] = a[k] * dl + b[k];
        }
        for k in (0..l).rev() {
            delta[k] = (delta[k + 1] - f[k]) / lam[k];
        }
        let step = delta.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if !step.is_finite() {
            return None;
        }
        for (w, d) in z.iter_mut().zip(&delta) {
            *w += *d;
        }
        if step <= 1e-13 * zs {
            return Some(z[0]);
        }
        if step >= last_step && step <= 1e-9 * zs {
            // stalled at roundoff
            return Some(z[0]);
        }
        last_step = step;
    }
    (last_step <= 1e-9 * zs).then_some(z[0])
}

/// Number of coarse levels approximated directly: the largest `t >= 1` with
/// `r0^(d^t) <= 1e100`.
fn top_levels(d: usize, r0: f64) -> usize {
    let mut t = 1;
    while (d as f64).powi(t as i32 + 1) * r0.log10() <= 100.0 {
        t += 1;
    }
    t
}

/// Trace the external ray of angle `theta` by pulling back the forward
/// orbit of the ray through successive equipotentials.
pub fn trace_ray(p: &Poly, theta: Angle, opts: &RayOptions) -> Result<Ray, PolyDynError> {
    let norm = Normalized::new(p)?;
    trace_normalized(&norm, theta, opts)
}

pub fn trace_rays(p: &Poly, angles: &[Angle], opts: &RayOptions) -> Result<Vec<Ray>, PolyDynError> {
    let norm = Normalized::new(p)?;
    angles.par_iter().map(|&a| trace_normalized(&norm, a, opts)).collect()
}

fn validate(opts: &RayOptions) -> Result<(), PolyDynError> {
    if !(opts.r0 > 10.0 && opts.r0.is_finite()) {
        return Err(PolyDynError::Invalid(format!("r0 must exceed 10, got {}", opts.r0)));
    }
    if opts.substeps == 0 || opts.depth == 0 || opts.newton_iters == 0 {
        return Err(PolyDynError::Invalid("depth, substeps and newton_iters must be positive".into()));
    }
    if opts.land.is_nan() || opts.land <= 0.0 {
        return Err(PolyDynError::Invalid("landing threshold must be positive".into()));
    }
    Ok(())
}

pub(crate) fn trace_normalized(norm: &Normalized, theta: Angle, opts: &RayOptions) -> Result<Ray, PolyDynError> {
    validate(opts)?;
    let d = norm.degree();
    let s = opts.substeps;
    let n = opts.depth;
    let t = top_levels(d, opts.r0);
    let top = t * s;
    let ln_r0 = opts.r0.ln();
    let radius = |idx: usize| {
        let m = idx as f64 - top as f64;
        (ln_r0 * (d as f64).powf(-m / s as f64)).exp()
    };

    // Ray j (angle d^j theta) is needed down to level n - j. Angles repeat
    // along a rational orbit, so each distinct angle is traced once, to the
    // deepest level any of its occurrences needs.
    let mut distinct: Vec<Angle> = Vec::new();
    let mut need: Vec<usize> = Vec::new();
    let mut a = theta;
    for j in 0..=n + t {
        let len = (top + n * s + 1).saturating_sub(j * s);
        match distinct.iter().position(|&x| x == a) {
            Some(i) => need[i] = need[i].max(len),
            None => {
                distinct.push(a);
                need.push(len);
            }
        }
        a = a.sigma(d as u32);
    }
    let (l, per) = orbit_type(theta, d as u32);
    let shoot = l + per <= MAX_SHOOTING_ORBIT;
    if shoot {
        // every orbit angle to full depth, so all landing estimates are sharp
        let mut a = *distinct.last().unwrap();
        while distinct.len() < l + per {
            a = a.sigma(d as u32);
            distinct.push(a);
        }
        need = vec![top + n * s + 1; l + per];
    }
    let succ: Vec<Option<usize>> =
        distinct.iter().map(|x| distinct.iter().position(|&y| y == x.sigma(d as u32))).collect();
    let q = &norm.q;
    let scale_a = norm.a.norm();
    let mut max_res = 0.0f64;
    let mut pts: Vec<Vec<Complex64>> = need.iter().map(|&l| Vec::with_capacity(l)).collect();
    let max_len = need[0];
    for idx in 0..max_len {
        for i in 0..distinct.len() {
            if need[i] <= idx {
                continue;
            }
            let z = if idx < s {
                phase(distinct[i]) * radius(idx)
            } else {
                let k = succ[i].expect("successor ray is traced whenever a finer level is needed");
                let w = pts[k][idx - s];
                let z = newton_preimage(q, w, pts[i][idx - 1], opts.newton_iters)
                    .ok_or(PolyDynError::NewtonDivergence { level: idx })?;
                let x_img = norm.to_original(w);
                max_res = max_res.max(scale_a * (q.eval(z) - w).norm() / x_img.norm().max(1.0));
                z
            };
            pts[i].push(z);
        }
    }
    let ray0 = std::mem::take(&mut pts[0]);
    let points: Vec<Point> = ray0[top..].iter().map(|&z| Point::from_complex(norm.to_original(z))).collect();

    let tail_len = (opts.tail_levels * s + 1).min(points.len());
    let tail = &points[points.len() - tail_len..];
    let tail_diameter = diameter(tail);
    let last = *points.last().unwrap();
    let status = if tail_diameter >= opts.land {
        RayStatus::Unresolved { estimate: last }
    } else {
        let z0 = *ray0.last().unwrap();
        let orbit = shoot.then(|| {
            let mut ends = vec![z0];
            ends.extend(pts[1..l + per].iter().map(|r| *r.last().unwrap()));
            refine_orbit(q, ends, l, per)
        });
        match orbit.flatten().or_else(|| refine_landing(q, z0, l, per)) {
            Some(w) => {
                let x = Point::from_complex(norm.to_original(w));
                if x.dist(last) <= opts.land.max(4.0 * tail_diameter) {
                    RayStatus::Landed { point: x }
                } else {
                    RayStatus::EscapedTolerance { estimate: last }
                }
            }
            None => RayStatus::EscapedTolerance { estimate: last },
        }
    };
    Ok(Ray {
        angle: theta,
        degree: d,
        substeps: s,
        points,
        status,
        tail_diameter,
        max_residual: max_res,
        preperiod: l,
        period: per,
    })
}

pub(crate) fn diameter(pts: &[Point]) -> f64 {
    let mut m = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            m = m.max(a.dist(*b));
        }
    }
    m
}

/// A warning when some critical point visibly escapes, in which case the
/// Julia set is disconnected and ray landing is not meaningful.
pub fn connectedness_warning(p: &Poly) -> Option<String> {
    let norm = Normalized::new(p).ok()?;
    let q = &norm.q;
    let bound = 2.0 + q.coeffs().iter().map(|c| c.norm()).sum::<f64>();
    for c in q.derivative().roots() {
        let mut z = c;
        for k in 0..500 {
            if z.norm() > bound {
                let x = norm.to_original(c);
                return Some(format!(
                    "critical point {:.6}{:+.6}i escapes after {k} iterates; the Julia set is disconnected",
                    x.re, x.im
                ));
            }
            z = q.eval(z);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Poly {
        Poly::real(&[0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn orbit_types() {
        assert_eq!(orbit_type(Angle::new(0, 1).unwrap(), 2), (0, 1));
        assert_eq!(orbit_type(Angle::new(1, 3).unwrap(), 2), (0, 2));
        assert_eq!(orbit_type(Angle::new(1, 4).unwrap(), 2), (2, 1));
        assert_eq!(orbit_type(Angle::new(1, 6).unwrap(), 2), (1, 2));
    }

    #[test]
    fn fixed_ray_of_z_squared() {
        let r = trace_ray(&z2(), Angle::new(0, 1).unwrap(), &RayOptions::default()).unwrap();
        let p = r.landing().unwrap();
        assert!(p.dist(Point::new(1.0, 0.0)) < 1e-9);
        assert!(r.points.iter().all(|q| q.y.abs() < 1e-9 && q.x >= 1.0 - 1e-9));
        assert!(r.max_residual < 1e-8);
    }

    #[test]
    fn shallow_depth_is_unresolved() {
        let opts = RayOptions { depth: 3, tail_levels: 2, ..RayOptions::default() };
        let r = trace_ray(&z2(), Angle::new(1, 3).unwrap(), &opts).unwrap();
        assert!(matches!(r.status, RayStatus::Unresolved { .. }));
    }

    #[test]
    fn disconnected_julia_set_is_flagged() {
        assert!(connectedness_warning(&Poly::real(&[1.0, 0.0, 1.0]).unwrap()).is_some());
        assert!(connectedness_warning(&Poly::real(&[-1.0, 0.0, 1.0]).unwrap()).is_none());
    }
}
