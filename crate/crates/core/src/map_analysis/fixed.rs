use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::geometry::{vector_degree, BBox, DegreeError, PlaneCurve, Point};
use crate::index_var::fixed_point_index;
use crate::map::PlaneMap;
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedKind {
    Repelling,
    Attracting,
    Parabolic,
    NeutralOther,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointRecord {
    pub location: Point,
    pub local_index: i64,
    pub multiplier: Option<Complex64>,
    pub kind: FixedKind,
}

/// Kind of a fixed point with multiplier `lambda`: parabolic when
/// `|lambda|` is within `1e-8` of one and `lambda^q` within `1e-6` of one for
/// some `q <= 64`.
pub fn classify_multiplier(lambda: Complex64) -> FixedKind {
    let m = lambda.norm();
    if m > 1.0 + 1e-8 {
        return FixedKind::Repelling;
    }
    if m < 1.0 - 1e-8 {
        return FixedKind::Attracting;
    }
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in 1..=64 {
        pow *= lambda;
        if (pow - 1.0).norm() <= 1e-6 {
            return FixedKind::Parabolic;
        }
    }
    FixedKind::NeutralOther
}

/// Starting probe radius around `p`: a quarter, reduced to half the distance
/// to the nearest other fixed point when the map is a polynomial.
fn probe_radius(f: &PlaneMap, p: Point) -> f64 {
    let mut r: f64 = 0.25;
    match f {
        PlaneMap::Polynomial(q) => {
            let z = p.to_complex();
            for root in q.displacement().roots() {
                let d = (root - z).norm();
                if d > 1e-3 {
                    r = r.min(0.5 * d);
                }
            }
        }
        PlaneMap::Grid(g) => {
            let b = g.bbox();
            let room = (p.x - b.min.x).min(b.max.x - p.x).min(p.y - b.min.y).min(b.max.y - p.y);
            r = r.min(0.5 * room);
        }
    }
    r
}

fn circle_index(f: &PlaneMap, p: Point, r: f64, tol: &Tolerances) -> Option<i64> {
    fixed_point_index(f, &PlaneCurve::circle(p, r, 64), tol).ok()
}

/// Local index at the fixed point `p`: the index on circles of halving
/// radii, returned once two consecutive radii agree.
pub fn local_index(f: &PlaneMap, p: Point, tol: &Tolerances) -> Result<i64, AnalysisError> {
    let r0 = probe_radius(f, p);
    let mut prev = circle_index(f, p, r0, tol);
    for k in 1..=30 {
        let cur = circle_index(f, p, r0 * 0.5f64.powi(k), tol);
        if let (Some(a), Some(b)) = (prev, cur) {
            if a == b {
                return Ok(a);
            }
        }
        prev = cur;
    }
    Err(AnalysisError::NotIsolated)
}

/// Cells are split off-center so that symmetric fixed points (like the
/// origin) do not sit on the first subdivision lines.
const SPLIT_FRAC: f64 = 0.5 + 1.0 / (16.0 * std::f64::consts::PI);
const JITTER_TRIES: usize = 8;
/// Below this fraction of the box diameter, a cell whose children cannot be
/// separated from a fixed point is accepted as a leaf.
const CLUSTER_FRAC: f64 = 1e-3;

fn jitter(k: usize, scale: f64) -> Point {
    if k == 0 {
        return Point::ORIGIN;
    }
    // golden-angle direction sequence
    let theta = k as f64 * 2.399_963_229_728_653;
    Point::polar(3.0 * scale * k as f64, theta)
}

struct Locator<'a> {
    f: &'a PlaneMap,
    eps: f64,
    leaf: f64,
    cluster: f64,
}

impl Locator<'_> {
    fn cell_index(&self, b: &BBox) -> Result<Option<i64>, AnalysisError> {
        let rect = PlaneCurve::rectangle(b);
        match vector_degree(&rect, |z| self.f.eval(z).map(|v| v - z), self.eps) {
            Ok(d) => Ok(Some(d)),
            Err(DegreeError::Vanishes(_)) => Ok(None),
            Err(DegreeError::Eval(e)) => Err(e.into()),
        }
    }

    fn run(&self, b: BBox, idx: i64, out: &mut Vec<(BBox, i64)>) -> Result<(), AnalysisError> {
        if idx == 0 {
            return Ok(());
        }
        let size = b.width().max(b.height());
        if size <= self.leaf {
            out.push((b, idx));
            return Ok(());
        }
        for k in 0..JITTER_TRIES {
            // keep the split line well inside the cell
            let d = jitter(k, 0.01 * size);
            let sx = b.min.x + b.width() * SPLIT_FRAC + d.x;
            let sy = b.min.y + b.height() * SPLIT_FRAC + d.y;
            let kids = [
                BBox::new(b.min, Point::new(sx, sy)),
                BBox::new(Point::new(sx, b.min.y), Point::new(b.max.x, sy)),
                BBox::new(Point::new(sx, sy), b.max),
                BBox::new(Point::new(b.min.x, sy), Point::new(sx, b.max.y)),
            ];
            let mut idxs = [0i64; 4];
            let mut ok = true;
            for (slot, kid) in idxs.iter_mut().zip(&kids) {
                match self.cell_index(kid)? {
                    Some(i) => *slot = i,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for (kid, i) in kids.into_iter().zip(idxs) {
                    self.run(kid, i, out)?;
                }
                return Ok(());
            }
        }
        if size <= self.cluster {
            out.push((b, idx));
            return Ok(());
        }
        Err(AnalysisError::BoundaryFixedPoint)
    }
}

/// Joins leaf cells lying within `gap` of each other, summing their indices.
fn merge_clusters(leaves: Vec<(BBox, i64)>, gap: f64) -> Vec<(BBox, i64)> {
    let mut out: Vec<(BBox, i64)> = Vec::new();
    for (b, i) in leaves {
        let near = |c: &BBox| {
            let dx = (c.min.x - b.max.x).max(b.min.x - c.max.x).max(0.0);
            let dy = (c.min.y - b.max.y).max(b.min.y - c.max.y).max(0.0);
            dx.hypot(dy) <= gap
        };
        match out.iter_mut().find(|(c, _)| near(c)) {
            Some((c, j)) => {
                *c = c.union(&b);
                *j += i;
            }
            None => out.push((b, i)),
        }
    }
    out
}

fn newton_refine(q: &crate::poly::Poly, z0: Complex64, limit: f64) -> Complex64 {
    let g = q.displacement();
    let mut z = z0;
    for _ in 0..200 {
        let (v, dv) = g.eval_with_derivative(z);
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    if (z - z0).norm() <= limit && z.re.is_finite() && z.im.is_finite() {
        z
    } else {
        z0
    }
}

/// Fixed points in the box by quadtree subdivision on the boundary index.
/// Records are sorted by location.
pub fn locate_fixed_points(f: &PlaneMap, b: &BBox, tol: &Tolerances) -> Result<Vec<FixedPointRecord>, AnalysisError> {
    let diam = b.diameter();
    let eps = tol.fix_at(diam);
    let loc = Locator { f, eps, leaf: (tol.fix * diam).max(64.0 * eps), cluster: CLUSTER_FRAC * diam };
    let mut root = None;
    for k in 0..JITTER_TRIES {
        let d = jitter(k, eps);
        let bb = BBox::new(b.min + d, b.max + d);
        if let Some(i) = loc.cell_index(&bb)? {
            root = Some((bb, i));
            break;
        }
    }
    let (bb, idx) = root.ok_or(AnalysisError::BoundaryFixedPoint)?;
    let mut leaves = Vec::new();
    loc.run(bb, idx, &mut leaves)?;
    let leaves = merge_clusters(leaves, 2.0 * loc.cluster);
    let mut out: Vec<FixedPointRecord> = leaves
        .into_iter()
        .map(|(cell, local_index)| {
            let c = cell.center();
            match f.as_poly() {
                Some(q) => {
                    let z = newton_refine(q, c.to_complex(), 4.0 * cell.diameter().max(eps));
                    let lambda = q.derivative().eval(z);
                    FixedPointRecord {
                        location: Point::from_complex(z),
                        local_index,
                        multiplier: Some(lambda),
                        kind: classify_multiplier(lambda),
                    }
                }
                None => FixedPointRecord { location: c, local_index, multiplier: None, kind: FixedKind::Unknown },
            }
        })
        .collect();
    out.sort_by(|a, b| a.location.x.total_cmp(&b.location.x).then(a.location.y.total_cmp(&b.location.y)));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologicalType {
    Repelling,
    Attracting,
    Unknown,
}

/// Whether the hull of `inner` lies in the interior of the hull of `outer`.
fn nested(inner: &[Point], outer: &[Point], eps: f64) -> bool {
    let Ok(outer) = PlaneCurve::closed(outer.to_vec()) else { return false };
    inner.iter().all(|&p| {
        outer.distance_to(p) > eps && crate::geometry::winding_number(&outer, p, eps).map(|w| w != 0).unwrap_or(false)
    })
}

/// Repelling/attracting type: by multiplier for polynomials, otherwise by
/// nesting of small circles and their images at three scales.
pub fn topological_type(f: &PlaneMap, p: Point, tol: &Tolerances) -> Result<TopologicalType, AnalysisError> {
    if let Some(q) = f.as_poly() {
        let lambda = q.derivative().eval(p.to_complex());
        return Ok(match classify_multiplier(lambda) {
            FixedKind::Repelling => TopologicalType::Repelling,
            FixedKind::Attracting => TopologicalType::Attracting,
            _ => TopologicalType::Unknown,
        });
    }
    let r0 = probe_radius(f, p);
    let mut rep = true;
    let mut att = true;
    for k in 0..3 {
        let r = r0 * 0.5f64.powi(k);
        let s = PlaneCurve::circle(p, r, 128);
        let img: Vec<Point> = s.vertices.iter().map(|&z| f.eval(z)).collect::<Result<_, _>>()?;
        let eps = tol.geom_at(r);
        rep &= nested(&s.vertices, &img, eps);
        att &= nested(&img, &s.vertices, eps);
    }
    Ok(if rep {
        TopologicalType::Repelling
    } else if att {
        TopologicalType::Attracting
    } else {
        TopologicalType::Unknown
    })
}
