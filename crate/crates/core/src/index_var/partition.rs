use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::variation::{variation_auto, VariationReport};
use super::{fixed_point_index, image_samples, polyline_curve_distance, IndexError};
use crate::geometry::{PlaneCurve, Point, Region};
use crate::map::PlaneMap;
use crate::Tolerances;

/// Points `a_0 < ... < a_n` on a counterclockwise simple closed curve such
/// that every `a_i` and `f(a_i)` lie in `X` and every link `[a_i, a_{i+1}]`
/// is disjoint from its image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllowablePartition {
    pub curve: PlaneCurve,
    /// Arclength positions of the points along `curve`, increasing.
    pub params: Vec<f64>,
    pub points: Vec<Point>,
    pub links: Vec<PlaneCurve>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmotReport {
    pub index: i64,
    pub variation_sum: i64,
    pub holds: bool,
    pub partition: AllowablePartition,
    pub links: Vec<VariationReport>,
}

const MAX_DEPTH: u32 = 20;
const SPLIT_SEARCH_LEVELS: u32 = 8;

struct Ctx<'a> {
    f: &'a PlaneMap,
    s: &'a PlaneCurve,
    x: &'a Region,
    len: f64,
    eps: f64,
    member: f64,
    max_chord: f64,
}

impl Ctx<'_> {
    fn admissible(&self, t: f64) -> Result<bool, IndexError> {
        let p = self.s.point_at(t);
        if !self.x.contains(p, self.member) {
            return Ok(false);
        }
        Ok(self.x.contains(self.f.eval(p)?, self.member))
    }

    fn link(&self, t0: f64, t1: f64) -> PlaneCurve {
        self.s.subarc(t0, t1)
    }

    fn link_clear(&self, t0: f64, t1: f64) -> Result<bool, IndexError> {
        let q = self.link(t0, t1);
        let img: Vec<Point> = image_samples(self.f, &q, self.max_chord)?.into_iter().map(|s| s.fz).collect();
        Ok(polyline_curve_distance(&img, &q) > self.eps)
    }

    /// Admissible point strictly inside `(t0, t1)` closest to its middle:
    /// curve vertices first, then dyadic points.
    fn split_point(&self, t0: f64, t1: f64, vertex_params: &[f64]) -> Result<Option<f64>, IndexError> {
        let span = t1 - t0;
        let mid = t0 + span / 2.0;
        let margin = span * 1e-6;
        let mut cands: Vec<f64> = Vec::new();
        for &v in vertex_params {
            for v in [v, v + self.len] {
                if v > t0 + margin && v < t1 - margin {
                    cands.push(v);
                }
            }
        }
        for k in 1..=SPLIT_SEARCH_LEVELS {
            let n = 1u64 << k;
            for m in (1..n).step_by(2) {
                cands.push(t0 + span * m as f64 / n as f64);
            }
        }
        cands.sort_by(|a, b| (a - mid).abs().total_cmp(&(b - mid).abs()).then(a.total_cmp(b)));
        for c in cands {
            if self.admissible(c)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }
}

/// [`find_allowable_partition_with`] starting from an 8-point net.
pub fn find_allowable_partition(
    f: &PlaneMap,
    s: &PlaneCurve,
    x: &Region,
    tol: &Tolerances,
) -> Result<AllowablePartition, IndexError> {
    find_allowable_partition_with(f, s, x, tol, 8)
}

/// Starts from the admissible points of a uniform `n0`-point net (falling back
/// to curve vertices in `X`) and splits links that meet their image.
pub fn find_allowable_partition_with(
    f: &PlaneMap,
    s: &PlaneCurve,
    x: &Region,
    tol: &Tolerances,
    n0: usize,
) -> Result<AllowablePartition, IndexError> {
    // also rejects non-simple curves and fixed points on the curve
    fixed_point_index(f, s, tol)?;
    let s = s.counterclockwise();
    let len = s.length();
    let diam = s.diameter().max(x.diameter());
    let eps = tol.geom_at(diam);
    let member = match x {
        Region::Raster(r) => eps.max(r.spec.h * 1e-6),
        _ => eps,
    };
    let ctx = Ctx { f, s: &s, x, len, eps, member, max_chord: diam / 256.0 };

    let cum = s.cumulative_lengths();
    let vertex_params: Vec<f64> = cum[..s.vertices.len()].to_vec();
    let n0 = n0.max(1);
    let mut anchors: Vec<f64> = Vec::new();
    for k in 0..n0 {
        let t = len * k as f64 / n0 as f64;
        if ctx.admissible(t)? {
            anchors.push(t);
        }
    }
    if anchors.len() < 2 {
        for &t in &vertex_params {
            if ctx.admissible(t)? {
                anchors.push(t);
            }
        }
        anchors.sort_by(f64::total_cmp);
        anchors.dedup_by(|a, b| (*a - *b).abs() <= eps);
    }
    if anchors.is_empty() {
        return Err(IndexError::NoPartition("no point of the curve in X has its image in X".into()));
    }

    // links as (start, end, depth), end may exceed len for the wrap-around link
    let mut pending: Vec<(f64, f64, u32)> = Vec::new();
    for (i, &t) in anchors.iter().enumerate() {
        let next = if i + 1 < anchors.len() { anchors[i + 1] } else { anchors[0] + len };
        pending.push((t, next, 0));
    }
    let mut done: Vec<(f64, f64)> = Vec::new();
    while let Some((t0, t1, depth)) = pending.pop() {
        let whole_loop = pending.is_empty() && done.is_empty() && (t1 - t0 - len).abs() <= eps;
        if !whole_loop && ctx.link_clear(t0, t1)? {
            done.push((t0, t1));
            continue;
        }
        if depth >= MAX_DEPTH {
            return Err(IndexError::NoPartition(format!(
                "link starting at arclength {t0:.6} still meets its image after {MAX_DEPTH} splits"
            )));
        }
        match ctx.split_point(t0, t1, &vertex_params)? {
            Some(m) => {
                pending.push((m, t1, depth + 1));
                pending.push((t0, m, depth + 1));
            }
            None => {
                return Err(IndexError::NoPartition(format!(
                    "link starting at arclength {t0:.6} meets its image and has no admissible split point"
                )))
            }
        }
    }
    done.sort_by(|a, b| a.0.total_cmp(&b.0));
    let params: Vec<f64> = done.iter().map(|l| l.0.rem_euclid(len)).collect();
    let points = params.iter().map(|&t| s.point_at(t)).collect();
    let links = done.iter().map(|&(a, b)| ctx.link(a, b)).collect();
    Ok(AllowablePartition { curve: s.clone(), params, points, links })
}

/// Computes the index on `s` and the variations of an allowable partition's
/// links; `holds` records whether `index == variation_sum + 1`.
pub fn fmot_verify(f: &PlaneMap, s: &PlaneCurve, x: &Region, tol: &Tolerances) -> Result<FmotReport, IndexError> {
    let partition = find_allowable_partition(f, s, x, tol)?;
    let index = fixed_point_index(f, &partition.curve, tol)?;
    let links: Vec<VariationReport> =
        partition.links.par_iter().map(|q| variation_auto(f, q, x, tol)).collect::<Result<_, _>>()?;
    let variation_sum = links.iter().map(|r| r.total).sum();
    Ok(FmotReport { index, variation_sum, holds: index == variation_sum + 1, partition, links })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64) -> PlaneCurve {
        PlaneCurve::circle(Point::ORIGIN, r, 96)
    }

    #[test]
    fn contraction_uses_uniform_net() {
        let t = Tolerances::default();
        let f = PlaneMap::real_poly(&[0.0, 0.5]).unwrap();
        let s = circle(1.0);
        let p = find_allowable_partition(&f, &s, &Region::Filled(s.clone()), &t).unwrap();
        assert_eq!(p.points.len(), 8);
        let r = fmot_verify(&f, &s, &Region::Filled(s.clone()), &t).unwrap();
        assert_eq!((r.index, r.variation_sum, r.holds), (1, 0, true));
    }

    #[test]
    fn translation_has_no_partition() {
        let t = Tolerances::default();
        let f = PlaneMap::real_poly(&[5.0, 1.0]).unwrap();
        let s = circle(1.0);
        let r = find_allowable_partition(&f, &s, &Region::Filled(s.clone()), &t);
        assert!(matches!(r, Err(IndexError::NoPartition(_))));
    }

    #[test]
    fn squaring_escapes_large_circle() {
        let t = Tolerances::default();
        let f = PlaneMap::real_poly(&[0.0, 0.0, 1.0]).unwrap();
        let s = circle(1.5);
        let r = find_allowable_partition(&f, &s, &Region::Filled(s.clone()), &t);
        assert!(matches!(r, Err(IndexError::NoPartition(_))));
    }

    #[test]
    fn squaring_inside_unit_circle() {
        let t = Tolerances::default();
        let f = PlaneMap::real_poly(&[0.0, 0.0, 1.0]).unwrap();
        let s = circle(0.9);
        let r = fmot_verify(&f, &s, &Region::Filled(s.clone()), &t).unwrap();
        assert_eq!((r.index, r.variation_sum, r.holds), (1, 0, true));
    }
}
