use serde::{Deserialize, Serialize};

use super::segment::{point_segment_distance, project_on_segment, segment_intersection};
use super::{BBox, GeomError, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Open,
    Closed,
}

/// A polygonal curve: an arc (`Open`) or a closed curve whose last vertex
/// connects back to the first. The closing vertex is never repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve")]
pub struct PlaneCurve {
    pub kind: CurveKind,
    pub vertices: Vec<Point>,
}

#[derive(Deserialize)]
struct RawCurve {
    kind: CurveKind,
    vertices: Vec<Point>,
}

impl TryFrom<RawCurve> for PlaneCurve {
    type Error = GeomError;
    fn try_from(r: RawCurve) -> Result<Self, GeomError> {
        PlaneCurve::new(r.kind, r.vertices)
    }
}

impl PlaneCurve {
    pub fn new(kind: CurveKind, mut vertices: Vec<Point>) -> Result<Self, GeomError> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        vertices.dedup();
        if kind == CurveKind::Closed && vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let min = match kind {
            CurveKind::Open => 2,
            CurveKind::Closed => 3,
        };
        if vertices.len() < min {
            return Err(GeomError::TooFewVertices { kind, got: vertices.len() });
        }
        Ok(PlaneCurve { kind, vertices })
    }

    pub fn open(vertices: Vec<Point>) -> Result<Self, GeomError> {
        Self::new(CurveKind::Open, vertices)
    }

    pub fn closed(vertices: Vec<Point>) -> Result<Self, GeomError> {
        Self::new(CurveKind::Closed, vertices)
    }

    /// Counterclockwise regular `n`-gon inscribed in the circle.
    pub fn circle(center: Point, radius: f64, n: usize) -> Self {
        let n = n.max(3);
        let vertices = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                center + Point::polar(radius, t)
            })
            .collect();
        PlaneCurve { kind: CurveKind::Closed, vertices }
    }

    /// Counterclockwise arc of a circle from angle `t0` to `t1` (radians, `t1 > t0`).
    pub fn circular_arc(center: Point, radius: f64, t0: f64, t1: f64, n: usize) -> Self {
        let n = n.max(1);
        let vertices = (0..=n).map(|k| center + Point::polar(radius, t0 + (t1 - t0) * k as f64 / n as f64)).collect();
        PlaneCurve { kind: CurveKind::Open, vertices }
    }

    pub fn rectangle(b: &BBox) -> Self {
        PlaneCurve { kind: CurveKind::Closed, vertices: b.corners().to_vec() }
    }

    pub fn segment(a: Point, b: Point) -> Self {
        PlaneCurve { kind: CurveKind::Open, vertices: vec![a, b] }
    }

    pub fn is_closed(&self) -> bool {
        self.kind == CurveKind::Closed
    }

    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    pub fn num_segments(&self) -> usize {
        match self.kind {
            CurveKind::Open => self.vertices.len() - 1,
            CurveKind::Closed => self.vertices.len(),
        }
    }

    pub fn segment_at(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.num_segments()).map(move |i| self.segment_at(i))
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&self.vertices).unwrap()
    }

    pub fn diameter(&self) -> f64 {
        self.bbox().diameter()
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    /// Absolute tolerance derived from a relative one and the curve size.
    pub fn abs_tol(&self, rel: f64) -> f64 {
        rel * self.diameter().max(1.0)
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        PlaneCurve { kind: self.kind, vertices: v }
    }

    /// Closed curves only: rotate the vertex list to start at index `k`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut v = self.vertices.clone();
        let n = v.len();
        v.rotate_left(k % n);
        PlaneCurve { kind: self.kind, vertices: v }
    }

    /// Insert the midpoint of every segment.
    pub fn refined(&self) -> Self {
        let mut v = Vec::with_capacity(self.vertices.len() * 2);
        for (a, b) in self.segments() {
            v.push(a);
            v.push(a.lerp(b, 0.5));
        }
        if self.kind == CurveKind::Open {
            v.push(self.last());
        }
        PlaneCurve { kind: self.kind, vertices: v }
    }

    /// Twice the signed area (closed curves); positive for counterclockwise.
    pub fn signed_area2(&self) -> f64 {
        self.segments().map(|(a, b)| a.cross(b)).sum()
    }

    /// Same curve traversed counterclockwise.
    pub fn counterclockwise(&self) -> Self {
        if self.is_closed() && self.signed_area2() < 0.0 {
            self.reversed()
        } else {
            self.clone()
        }
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        self.segments().map(|(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }

    /// Whether the curve has no self-intersections (other than shared
    /// endpoints of consecutive segments).
    pub fn is_simple(&self) -> bool {
        self.first_self_intersection().is_none()
    }

    /// First pair of non-adjacent segments that meet.
    pub fn first_self_intersection(&self) -> Option<(usize, usize)> {
        let m = self.num_segments();
        let closed = self.is_closed();
        for i in 0..m {
            let (a0, a1) = self.segment_at(i);
            for j in (i + 1)..m {
                let adjacent = j == i + 1 || (closed && i == 0 && j == m - 1);
                let (b0, b1) = self.segment_at(j);
                if adjacent {
                    // adjacent segments may only share their common vertex;
                    // detect folding back onto each other
                    let shared = if j == i + 1 { a1 } else { a0 };
                    let (other_a, other_b) = if j == i + 1 { (a0, b1) } else { (a1, b0) };
                    let da = other_a - shared;
                    let db = other_b - shared;
                    if da.cross(db).abs() <= 1e-14 * da.norm() * db.norm() && da.dot(db) > 0.0 {
                        return Some((i, j));
                    }
                    continue;
                }
                if segment_intersection(a0, a1, b0, b1, false).is_some() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Cumulative arclength at each vertex (closed curves get a final entry
    /// for the return to the first vertex).
    pub fn cumulative_lengths(&self) -> Vec<f64> {
        let mut acc = Vec::with_capacity(self.num_segments() + 1);
        let mut s = 0.0;
        acc.push(0.0);
        for (a, b) in self.segments() {
            s += a.dist(b);
            acc.push(s);
        }
        acc
    }

    /// Point at arclength `s` (wrapped for closed curves, clamped for open ones).
    pub fn point_at(&self, s: f64) -> Point {
        let cum = self.cumulative_lengths();
        let total = *cum.last().unwrap();
        let s = if self.is_closed() { s.rem_euclid(total) } else { s.clamp(0.0, total) };
        let i = match cum.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.num_segments() - 1),
            Err(i) => i.saturating_sub(1).min(self.num_segments() - 1),
        };
        let (a, b) = self.segment_at(i);
        let len = cum[i + 1] - cum[i];
        if len == 0.0 {
            a
        } else {
            a.lerp(b, (s - cum[i]) / len)
        }
    }

    /// Arclength of the closest point of the curve to `p`.
    pub fn project(&self, p: Point) -> f64 {
        let cum = self.cumulative_lengths();
        let mut best = (f64::INFINITY, 0.0);
        for (i, (a, b)) in self.segments().enumerate() {
            let t = project_on_segment(p, a, b);
            let d = p.dist(a.lerp(b, t));
            if d < best.0 {
                best = (d, cum[i] + t * (cum[i + 1] - cum[i]));
            }
        }
        best.1
    }

    /// Sub-arc between arclengths `s0` and `s1`. For closed curves the arc
    /// runs forward from `s0` (wrapping); for open curves `s0 < s1` is required.
    pub fn subarc(&self, s0: f64, s1: f64) -> PlaneCurve {
        let cum = self.cumulative_lengths();
        let total = *cum.last().unwrap();
        let (s0, mut s1) = if self.is_closed() {
            let a = s0.rem_euclid(total);
            let mut b = s1.rem_euclid(total);
            if b <= a {
                b += total;
            }
            (a, b)
        } else {
            (s0.clamp(0.0, total), s1.clamp(0.0, total))
        };
        if s1 < s0 {
            s1 = s0;
        }
        let mut v = vec![self.point_at(s0)];
        let laps = if self.is_closed() { 2 } else { 1 };
        for lap in 0..laps {
            let off = lap as f64 * total;
            for (i, c) in cum.iter().enumerate().take(self.vertices.len()) {
                let s = c + off;
                if s > s0 && s < s1 {
                    v.push(self.vertices[i]);
                }
            }
        }
        v.push(self.point_at(s1));
        v.dedup();
        if v.len() < 2 {
            v.push(v[0]);
        }
        PlaneCurve { kind: CurveKind::Open, vertices: v }
    }

    /// Evenly spaced samples along the curve with spacing at most `h`.
    pub fn sample(&self, h: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for (a, b) in self.segments() {
            let n = ((a.dist(b) / h).ceil() as usize).max(1);
            for k in 0..n {
                out.push(a.lerp(b, k as f64 / n as f64));
            }
        }
        if !self.is_closed() {
            out.push(self.last());
        }
        out
    }

    /// Unit tangent at arclength `s`.
    pub fn tangent_at(&self, s: f64) -> Point {
        let eps = (self.length() * 1e-6).max(1e-12);
        let a = self.point_at(s - eps);
        let b = self.point_at(s + eps);
        (b - a).normalized()
    }

    /// Whether any segment of `self` meets any segment of `other`, ignoring
    /// contacts within `skip_radius` of `skip_point`.
    pub fn intersects(&self, other: &PlaneCurve, skip: Option<(Point, f64)>) -> bool {
        for (a0, a1) in self.segments() {
            for (b0, b1) in other.segments() {
                if let Some((t, _)) = segment_intersection(a0, a1, b0, b1, false) {
                    let p = a0.lerp(a1, t);
                    if let Some((c, r)) = skip {
                        if p.dist(c) <= r {
                            continue;
                        }
                    }
                    return true;
                }
            }
        }
        false
    }
}
