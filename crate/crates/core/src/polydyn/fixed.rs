use std::collections::BTreeSet;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::ray::{trace_normalized, RayOptions};
use super::{Normalized, PolyDynError};
use crate::geometry::Point;
use crate::lamination::Angle;
use crate::map_analysis::{classify_multiplier, FixedKind, FixedPointRecord};
use crate::poly::Poly;
use crate::Tolerances;

/// Refine `p` to a fixed point of `P` by Newton on `P(z) - z` and classify
/// it by its multiplier. The index is the multiplicity of the root.
pub fn classify_fixed(poly: &Poly, p: Point, tol: &Tolerances) -> Result<FixedPointRecord, PolyDynError> {
    let g = poly.displacement();
    let mut z = p.to_complex();
    for _ in 0..200 {
        let (v, dv) = g.eval_with_derivative(z);
        if v.norm() == 0.0 || dv.norm() == 0.0 {
            break;
        }
        let zn = z - v / dv;
        if g.eval(zn).norm() >= v.norm() {
            break;
        }
        z = zn;
    }
    let scale = z.norm().max(1.0);
    let res = g.eval(z).norm();
    if res > tol.fix_at(scale) || (z - p.to_complex()).norm() > 1e-3 * scale {
        return Err(PolyDynError::NotFixed(g.eval(p.to_complex()).norm()));
    }
    let lambda = poly.derivative().eval(z);
    let radius = 1e-4 * scale;
    let index = g.roots().iter().filter(|r| (**r - z).norm() < radius).count().max(1) as i64;
    let lambda = snap(lambda);
    Ok(FixedPointRecord {
        location: Point::from_complex(snap(z)),
        local_index: index,
        multiplier: Some(lambda),
        kind: classify_multiplier(lambda),
    })
}

// roundoff below 1e-13 is reported as zero
fn snap(z: Complex64) -> Complex64 {
    let c = |x: f64| if x.abs() < 1e-13 { 0.0 } else { x };
    Complex64::new(c(z.re), c(z.im))
}

/// Rays of denominator at most `qmax` landing at a fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedRays {
    pub point: Point,
    pub kind: FixedKind,
    pub angles: Vec<Angle>,
    /// Angles whose rays did not land at the working depth.
    pub unresolved: Vec<Angle>,
    /// Whether `sigma_d` permutes `angles`.
    pub permutation: bool,
    pub fault: Option<String>,
}

impl FixedRays {
    /// Whether every landing ray is fixed by `sigma_d`.
    pub fn all_fixed(&self, d: u32) -> bool {
        self.angles.iter().all(|a| a.sigma(d) == *a)
    }
}

/// All reduced angles `k / q` with `1 <= q <= qmax`.
pub fn rational_angles(qmax: i64) -> Vec<Angle> {
    let mut out = BTreeSet::new();
    for q in 1..=qmax {
        for k in 0..q {
            if k.gcd(&q) == 1 {
                out.insert(Angle::new(k, q).unwrap());
            }
        }
    }
    out.into_iter().collect()
}

pub fn fixed_rays_at(
    poly: &Poly,
    p: Point,
    qmax: i64,
    opts: &RayOptions,
    tol: &Tolerances,
) -> Result<FixedRays, PolyDynError> {
    use rayon::prelude::*;
    if qmax < 1 {
        return Err(PolyDynError::Invalid(format!("qmax must be positive, got {qmax}")));
    }
    let rec = classify_fixed(poly, p, tol)?;
    let norm = Normalized::new(poly)?;
    let d = norm.degree() as u32;
    let angles = rational_angles(qmax);
    let rays: Vec<_> = angles.par_iter().map(|&a| trace_normalized(&norm, a, opts)).collect::<Result<_, _>>()?;
    let mut landing = Vec::new();
    let mut unresolved = Vec::new();
    for r in &rays {
        match r.landing() {
            Some(x) if x.dist(rec.location) <= opts.land => landing.push(r.angle),
            Some(_) => {}
            None => {
                if r.endpoint().dist(rec.location) <= opts.land.max(r.tail_diameter) {
                    unresolved.push(r.angle);
                }
            }
        }
    }
    let set: BTreeSet<Angle> = landing.iter().copied().collect();
    let images: BTreeSet<Angle> = landing.iter().map(|a| a.sigma(d)).collect();
    let permutation = images == set;
    let fault = (!permutation).then(|| {
        let missing: Vec<String> =
            landing.iter().filter(|a| !set.contains(&a.sigma(d))).map(|a| format!("{a} -> {}", a.sigma(d))).collect();
        format!("landing set is not closed under sigma_{d}: {}", missing.join(", "))
    });
    Ok(FixedRays { point: rec.location, kind: rec.kind, angles: landing, unresolved, permutation, fault })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplier_table() {
        let tol = Tolerances::default();
        let z2 = Poly::real(&[0.0, 0.0, 1.0]).unwrap();
        let r = classify_fixed(&z2, Point::new(1.0, 0.0), &tol).unwrap();
        assert_eq!(r.kind, FixedKind::Repelling);
        assert_eq!(r.multiplier, Some(Complex64::new(2.0, 0.0)));
        let r = classify_fixed(&z2, Point::new(0.0, 0.0), &tol).unwrap();
        assert_eq!(r.kind, FixedKind::Attracting);
        let par = Poly::real(&[0.0, 1.0, 1.0]).unwrap();
        let r = classify_fixed(&par, Point::new(0.0, 0.0), &tol).unwrap();
        assert_eq!(r.kind, FixedKind::Parabolic);
        assert_eq!(r.local_index, 2);
        assert!(matches!(classify_fixed(&z2, Point::new(0.5, 0.5), &tol), Err(PolyDynError::NotFixed(_))));
    }

    #[test]
    fn angle_enumeration() {
        assert_eq!(rational_angles(1).len(), 1);
        // 1 + 1 + 2 + 2 + 4
        assert_eq!(rational_angles(5).len(), 10);
    }
}
