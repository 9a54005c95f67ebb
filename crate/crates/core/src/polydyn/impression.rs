use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ray::{diameter, trace_normalized, RayOptions};
use super::{Normalized, PolyDynError};
use crate::geometry::Point;
use crate::lamination::Angle;
use crate::poly::Poly;

/// Samples on the equipotential arc closing each neighborhood.
const ARC_SAMPLES: i64 = 8;
/// Levels traced below the equipotential so the side rays reach their landing points.
const EXTRA_LEVELS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ImpressionVerdict {
    /// Diameters fell below the threshold at `level`. This is evidence, not proof.
    ConsistentWithDegenerate {
        level: usize,
    },
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpressionReport {
    pub angle: Angle,
    pub threshold: f64,
    /// Raw diameter of the neighborhood cut off at level `k`, for `k = 1..=depth`.
    pub diameters: Vec<f64>,
    /// Running minimum of `diameters`, a nonincreasing bound.
    pub bound: Vec<f64>,
    pub verdict: ImpressionVerdict,
}

/// Diameter estimates of shrinking neighborhoods of the impression of `theta`.
///
/// At level `k` the neighborhood is bounded by the rays of angle
/// `theta +- d^-k` below the level-`k` equipotential and by that equipotential
/// between them.
pub fn impression_diameter_bound(
    poly: &Poly,
    theta: Angle,
    depth: usize,
    threshold: f64,
    opts: &RayOptions,
) -> Result<ImpressionReport, PolyDynError> {
    let norm = Normalized::new(poly)?;
    let d = norm.degree() as i64;
    if depth == 0 {
        return Err(PolyDynError::Invalid("depth must be positive".into()));
    }
    let mut dk: Vec<i64> = Vec::with_capacity(depth);
    let mut v: i64 = 1;
    for _ in 0..depth {
        v = v
            .checked_mul(d)
            .filter(|x| x.checked_mul(theta.denom() * ARC_SAMPLES).is_some())
            .ok_or_else(|| PolyDynError::Invalid(format!("depth {depth} overflows exact angle arithmetic")))?;
        dk.push(v);
    }
    let diameters: Vec<f64> = dk
        .par_iter()
        .enumerate()
        .map(|(i, &den)| {
            let k = i + 1;
            let delta = Ratio::new(1, den);
            let side = RayOptions { depth: k + EXTRA_LEVELS, ..*opts };
            let mut pts: Vec<Point> = Vec::new();
            for a in [theta.rotate(-delta), theta.rotate(delta)] {
                let r = trace_normalized(&norm, a, &side)?;
                pts.extend_from_slice(r.from_level(k));
            }
            let arc = RayOptions { depth: k, ..*opts };
            for j in 1..2 * ARC_SAMPLES {
                let a = theta.rotate(-delta + Ratio::new(2 * j, 2 * ARC_SAMPLES * den));
                let r = trace_normalized(&norm, a, &arc)?;
                pts.push(*r.points.last().unwrap());
            }
            Ok(diameter(&pts))
        })
        .collect::<Result<_, PolyDynError>>()?;
    let mut bound = Vec::with_capacity(depth);
    let mut m = f64::INFINITY;
    for &x in &diameters {
        m = m.min(x);
        bound.push(m);
    }
    let verdict = match bound.iter().position(|&b| b < threshold) {
        Some(i) => ImpressionVerdict::ConsistentWithDegenerate { level: i + 1 },
        None => ImpressionVerdict::Unresolved,
    };
    Ok(ImpressionReport { angle: theta, threshold, diameters, bound, verdict })
}
