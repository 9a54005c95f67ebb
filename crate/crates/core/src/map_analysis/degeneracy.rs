use serde::{Deserialize, Serialize};

use super::{
    local_index, locate_fixed_points, repels_outside_witness, scramble_check, AnalysisError, RepelOptions,
    ScrambleConfig, ScrambleVerdict,
};
use crate::geometry::{PlaneCurve, Point};
use crate::map::PlaneMap;
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisStatus {
    pub name: String,
    pub certified: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub fixed_points: Vec<Point>,
    pub hypotheses: Vec<HypothesisStatus>,
    pub all_certified: bool,
    pub x_diameter: f64,
    pub resolution: f64,
    /// All hypotheses certified on a set wider than the resolution. Such
    /// hypotheses force `X` to be a point, so this signals a numerical fault.
    pub contradiction_alarm: bool,
}

fn status(name: &str, certified: bool, detail: impl Into<String>) -> HypothesisStatus {
    HypothesisStatus { name: name.into(), certified, detail: detail.into() }
}

/// Checks whether every fixed point in `X` has local index one and a
/// repelling-outside witness (using the ray in `rays` landing there), and
/// whether `f` scrambles the boundary with each exit either cleared by
/// `f(K_i)` or surrounded by a neighborhood `W_i` with `f(W_i ∩ X) ⊂ X`.
pub fn degeneracy_check(
    f: &PlaneMap,
    cfg: &ScrambleConfig,
    rays: &[PlaneCurve],
    opts: &RepelOptions,
    tol: &Tolerances,
) -> Result<DegeneracyReport, AnalysisError> {
    let xb = cfg.x.bbox();
    let scene = cfg.exits.iter().fold(xb, |b, e| b.union(&e.z.bbox()));
    let resolution = tol.cell(scene.diameter());
    let b = xb.expand(0.05 * xb.diameter().max(1e-3));
    let near = 1e-6 * b.diameter().max(1.0);
    let fixed: Vec<Point> =
        locate_fixed_points(f, &b, tol)?.into_iter().map(|r| r.location).filter(|&p| cfg.x.contains(p, near)).collect();

    let mut hyps = Vec::new();
    for &p in &fixed {
        let idx = local_index(f, p, tol)?;
        hyps.push(status(&format!("index one at ({:.6}, {:.6})", p.x, p.y), idx == 1, format!("local index {idx}")));
        let ray = rays.iter().find(|r| r.last().dist(p) <= near);
        let (ok, detail) = match ray {
            None => (false, "no ray landing at this fixed point was supplied".to_string()),
            Some(r) => match repels_outside_witness(f, &cfg.x, p, r, opts, tol) {
                Ok(w) if w.variation.total == 1 => (true, "witness crosscut with variation +1".into()),
                Ok(w) => (false, format!("crosscut variation {}", w.variation.total)),
                Err(e) => (false, e.to_string()),
            },
        };
        hyps.push(status(&format!("repels outside at ({:.6}, {:.6})", p.x, p.y), ok, detail));
    }

    let sc = scramble_check(f, cfg, tol)?;
    hyps.push(status(
        "scrambles the boundary",
        sc.verdict != ScrambleVerdict::None,
        format!("violated clauses: {:?}", sc.violated),
    ));
    let w = 4.0 * sc.spacing;
    for (i, e) in cfg.exits.iter().enumerate() {
        let imgs: Vec<Point> = e.k.sample(sc.spacing).into_iter().map(|p| f.eval(p)).collect::<Result<_, _>>()?;
        let cleared = imgs.iter().all(|&y| !e.z.contains(y, sc.tolerance));
        let mut local_invariant = true;
        for q in cfg.x.sample(sc.spacing) {
            if e.k.distance(q) <= w && !cfg.x.contains(f.eval(q)?, sc.tolerance) {
                local_invariant = false;
                break;
            }
        }
        hyps.push(status(
            &format!("exit {} cleared or locally invariant", i + 1),
            cleared || local_invariant,
            format!("cleared: {cleared}, locally invariant: {local_invariant}"),
        ));
    }
    let all_certified = hyps.iter().all(|h| h.certified);
    let x_diameter = cfg.x.diameter();
    Ok(DegeneracyReport {
        fixed_points: fixed,
        hypotheses: hyps,
        all_certified,
        x_diameter,
        resolution,
        contradiction_alarm: all_certified && x_diameter > resolution,
    })
}
