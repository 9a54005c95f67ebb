//! Segment predicates shared by curves, junctions and rasters.

use super::Point;

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

/// Parameter of the closest point of `[a, b]` to `p`, in `[0, 1]`.
pub fn project_on_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    }
}

/// Intersection parameters `(s, t)` of segments `p0 + s(p1-p0)` and `q0 + t(q1-q0)`.
///
/// `q_unbounded` treats the second segment as a half-line starting at `q0`.
/// Parallel segments report `None` unless they overlap, in which case the
/// overlap start on the first segment is returned.
pub fn segment_intersection(p0: Point, p1: Point, q0: Point, q1: Point, q_unbounded: bool) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    let qp = q0 - p0;
    let scale = r.norm() * s.norm();
    if denom.abs() <= 1e-14 * scale {
        // parallel
        if qp.cross(r).abs() > 1e-12 * (r.norm().max(1e-300)) * qp.norm().max(1.0) {
            return None;
        }
        let rr = r.dot(r);
        if rr == 0.0 {
            return None;
        }
        let t0 = qp.dot(r) / rr;
        let t1 = (q1 - p0).dot(r) / rr;
        let (lo, hi) = if q_unbounded {
            if t1 >= t0 {
                (t0, f64::INFINITY)
            } else {
                (f64::NEG_INFINITY, t0)
            }
        } else {
            (t0.min(t1), t0.max(t1))
        };
        let a = lo.max(0.0);
        let b = hi.min(1.0);
        if a <= b {
            let pt = p0 + r * a;
            let ss = s.dot(s);
            let tq = if ss == 0.0 { 0.0 } else { (pt - q0).dot(s) / ss };
            return Some((a, tq));
        }
        return None;
    }
    let t_p = qp.cross(s) / denom;
    let t_q = qp.cross(r) / denom;
    let in_q = if q_unbounded { t_q >= 0.0 } else { (0.0..=1.0).contains(&t_q) };
    if (0.0..=1.0).contains(&t_p) && in_q {
        Some((t_p, t_q))
    } else {
        None
    }
}

/// Minimum distance between two closed segments.
pub fn segment_segment_distance(p0: Point, p1: Point, q0: Point, q1: Point) -> f64 {
    if segment_intersection(p0, p1, q0, q1, false).is_some() {
        return 0.0;
    }
    point_segment_distance(p0, q0, q1)
        .min(point_segment_distance(p1, q0, q1))
        .min(point_segment_distance(q0, p0, p1))
        .min(point_segment_distance(q1, p0, p1))
}

/// Distance from `p` to the half-line starting at `a` through `b`.
pub fn point_halfline_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / len2).max(0.0);
    p.dist(a + d * t)
}
