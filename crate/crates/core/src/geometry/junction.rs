use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::region::default_spec;
use super::segment::segment_intersection;
use super::{BBox, GeomError, PlaneCurve, Point, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RayLabel {
    #[serde(rename = "R+")]
    Plus,
    #[serde(rename = "Ri")]
    I,
    #[serde(rename = "R-")]
    Minus,
}

/// Three polygonal rays from a common vertex, counterclockwise in the order
/// `R+`, `Ri`, `R-`. The last leg of each ray is treated as a half-line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub vertex: Point,
    pub heading: f64,
    pub ray_plus: PlaneCurve,
    pub ray_i: PlaneCurve,
    pub ray_minus: PlaneCurve,
    /// Smallest distance between distinct rays away from the vertex scale.
    pub feature: f64,
}

impl Junction {
    /// Fork-shaped junction: `Ri` runs straight along `heading`; `R+` and `R-`
    /// leave the vertex on short stubs to the right and left (tilted toward
    /// `Ri` by `tilt`) and then run parallel to `Ri`.
    pub fn fork(v: Point, heading: f64, stub: f64, tilt: f64, reach: f64) -> Junction {
        let dir = Point::polar(1.0, heading);
        let p = v + Point::polar(stub, heading - FRAC_PI_2 + tilt);
        let m = v + Point::polar(stub, heading + FRAC_PI_2 - tilt);
        let mk = |pts: Vec<Point>| PlaneCurve::open(pts).expect("fork rays have distinct vertices");
        Junction {
            vertex: v,
            heading,
            ray_plus: mk(vec![v, p, p + dir * reach]),
            ray_i: mk(vec![v, v + dir * reach]),
            ray_minus: mk(vec![v, m, m + dir * reach]),
            feature: stub * tilt.cos(),
        }
    }

    pub fn rays(&self) -> [(RayLabel, &PlaneCurve); 3] {
        [(RayLabel::Plus, &self.ray_plus), (RayLabel::I, &self.ray_i), (RayLabel::Minus, &self.ray_minus)]
    }

    /// Same junction with its vertex moved by `delta` (rays translated).
    pub fn translated(&self, delta: Point) -> Junction {
        let mv =
            |c: &PlaneCurve| PlaneCurve { kind: c.kind, vertices: c.vertices.iter().map(|&p| p + delta).collect() };
        Junction {
            vertex: self.vertex + delta,
            heading: self.heading,
            ray_plus: mv(&self.ray_plus),
            ray_i: mv(&self.ray_i),
            ray_minus: mv(&self.ray_minus),
            feature: self.feature,
        }
    }

    /// Distance from `p` to the junction (rays extended as half-lines).
    pub fn distance(&self, p: Point) -> f64 {
        use super::segment::{point_halfline_distance, point_segment_distance};
        self.rays()
            .iter()
            .map(|(_, c)| {
                let n = c.vertices.len();
                let mut d = point_halfline_distance(p, c.vertices[n - 2], c.vertices[n - 1]);
                for w in c.vertices[..n - 1].windows(2) {
                    d = d.min(point_segment_distance(p, w[0], w[1]));
                }
                d
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Points where the segment `[p0, p1]` meets the junction, as
    /// `(segment parameter, ray)`, sorted by parameter. A meeting within
    /// `vertex_tol` of the vertex is reported once, as `Ri`.
    pub fn hits(&self, p0: Point, p1: Point, vertex_tol: f64) -> Vec<(f64, RayLabel)> {
        let mut out: Vec<(f64, RayLabel)> = Vec::new();
        let mut vertex_hit: Option<f64> = None;
        for (label, ray) in self.rays() {
            let n = ray.vertices.len();
            for k in 0..n - 1 {
                let (q0, q1) = (ray.vertices[k], ray.vertices[k + 1]);
                let last = k == n - 2;
                if let Some((t, _)) = segment_intersection(p0, p1, q0, q1, last) {
                    let x = p0.lerp(p1, t);
                    if x.dist(self.vertex) <= vertex_tol {
                        vertex_hit = Some(vertex_hit.map_or(t, |s: f64| s.min(t)));
                    } else {
                        out.push((t, label));
                    }
                }
            }
        }
        // a hit at a stub corner shows up on both legs of the same ray
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.dedup_by(|a, b| a.1 == b.1 && (a.0 - b.0).abs() <= 1e-12);
        if let Some(t) = vertex_hit {
            out.retain(|h| (h.0 - t).abs() > 1e-12);
            out.push((t, RayLabel::I));
            out.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        out
    }

    /// Whether the three rays meet only at the vertex.
    pub fn rays_disjoint(&self) -> bool {
        let r = self.rays();
        for a in 0..3 {
            for b in (a + 1)..3 {
                if r[a].1.intersects(r[b].1, Some((self.vertex, self.feature * 1e-6))) {
                    return false;
                }
            }
        }
        true
    }
}

fn union_bbox(v: Point, obstacles: &[Region]) -> BBox {
    let mut b = BBox::new(v, v);
    for o in obstacles {
        b = b.union(&o.bbox());
    }
    b
}

/// Whether `v` can be joined to infinity in the complement of the obstacles,
/// judged on a raster.
fn sees_infinity(v: Point, obstacles: &[Region], eps: f64) -> bool {
    if obstacles.iter().any(|o| o.interior_contains(v, eps)) {
        return false;
    }
    let b = union_bbox(v, obstacles);
    let spec = default_spec(&b, 256);
    let mut blocked = super::Raster::empty(spec);
    for o in obstacles {
        blocked = blocked.union(&o.rasterize(spec));
    }
    let reach = blocked.reach_from_infinity();
    let r = 3.0 * spec.h;
    let Some((ci, cj)) = spec.cell_of(v) else { return true };
    let k = 3isize;
    for dj in -k..=k {
        for di in -k..=k {
            let (i, j) = (ci as isize + di, cj as isize + dj);
            if i < 0 || j < 0 || i as usize >= spec.nx || j as usize >= spec.ny {
                continue;
            }
            let (i, j) = (i as usize, j as usize);
            if reach.get(i, j) && spec.center(i, j).dist(v) <= r * 1.5 {
                return true;
            }
        }
    }
    false
}

fn ray_clear(ray: &PlaneCurve, clip: f64, obstacles: &[Region], eps: f64) -> bool {
    let n = ray.vertices.len();
    for k in 0..n - 1 {
        let (mut a, b) = (ray.vertices[k], ray.vertices[k + 1]);
        if k == 0 {
            let len = a.dist(b);
            if len <= clip {
                continue;
            }
            a = a.lerp(b, clip / len);
        }
        if obstacles.iter().any(|o| o.segment_hits(a, b, eps)) {
            return false;
        }
    }
    true
}

/// All fork junctions at `v` that avoid the obstacles away from `v`, in the
/// order they are tried: heading perturbations outermost, then stub length
/// (longest first), then stub tilt.
pub fn junction_candidates<'a>(
    v: Point,
    heading: f64,
    obstacles: &'a [Region],
    eps: f64,
) -> impl Iterator<Item = Junction> + 'a {
    let b = union_bbox(v, obstacles);
    let diam = b.diameter().max(1e-9);
    let reach = v.dist(b.center()) + diam + 0.25 * diam;
    let clip = (1e-6 * diam).max(1e3 * eps);
    let offsets = std::iter::once(0i32).chain((1..=8).flat_map(|k| [k, -k]));
    offsets.flat_map(move |k| {
        let h = heading + k as f64 * PI / 16.0;
        (3..=12).flat_map(move |m| {
            let stub = diam * 0.5f64.powi(m);
            [0.0, PI / 8.0, PI / 4.0, 3.0 * PI / 8.0].into_iter().filter_map(move |tilt| {
                let j = Junction::fork(v, h, stub, tilt, reach);
                j.rays().iter().all(|(_, r)| ray_clear(r, clip.min(stub * 0.5), obstacles, eps)).then_some(j)
            })
        })
    })
}

/// Junction at `v` whose middle ray leaves along `heading` (radians) and
/// whose rays meet the obstacles only at `v`.
pub fn build_junction(v: Point, heading: f64, obstacles: &[Region], eps: f64) -> Result<Junction, GeomError> {
    if !v.is_finite() || !heading.is_finite() {
        return Err(GeomError::NonFinite);
    }
    if !sees_infinity(v, obstacles, eps) {
        return Err(GeomError::NoEscape);
    }
    junction_candidates(v, heading, obstacles, eps).next().ok_or(GeomError::RoutingFailed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semicircle() -> PlaneCurve {
        PlaneCurve::circular_arc(Point::ORIGIN, 0.5, 0.0, PI, 64)
    }

    #[test]
    fn junction_over_segment_arc() {
        let x = Region::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let a = Region::Curve(semicircle());
        let v = Point::new(0.0, 0.5);
        let j = build_junction(v, FRAC_PI_2, &[x, a], 1e-9).unwrap();
        assert!(j.rays_disjoint());
        let tip = *j.ray_i.vertices.last().unwrap();
        assert!(tip.x.abs() < 1e-12 && tip.y > 1.0);
        // counterclockwise order R+, Ri, R- around the vertex
        let ang = |c: &PlaneCurve| (c.vertices[1] - v).angle();
        assert!(ang(&j.ray_plus) < ang(&j.ray_i) && ang(&j.ray_i) < ang(&j.ray_minus));
    }

    #[test]
    fn interior_vertex_has_no_escape() {
        let disk = Region::Filled(PlaneCurve::circle(Point::ORIGIN, 1.0, 64));
        assert_eq!(build_junction(Point::ORIGIN, 0.0, &[disk], 1e-9), Err(GeomError::NoEscape));
    }

    #[test]
    fn annulus_inner_boundary_has_no_escape() {
        // two arcs forming a closed ring of width 0.5 around the origin
        let outer = PlaneCurve::circle(Point::ORIGIN, 2.0, 96);
        let inner = PlaneCurve::circle(Point::ORIGIN, 1.5, 96);
        let obstacles = [Region::Curve(outer), Region::Curve(inner)];
        let v = Point::new(1.5, 0.0);
        assert_eq!(build_junction(v, PI, &obstacles, 1e-9), Err(GeomError::NoEscape));
    }

    #[test]
    fn vertex_hits_count_as_ri() {
        let j = Junction::fork(Point::ORIGIN, FRAC_PI_2, 0.1, 0.0, 10.0);
        let h = j.hits(Point::new(0.0, -1.0), Point::new(0.0, 1.0), 1e-9);
        assert_eq!(h, vec![(0.5, RayLabel::I)]);
        let h = j.hits(Point::new(1.0, 0.5), Point::new(-1.0, 0.5), 1e-9);
        let labels: Vec<_> = h.iter().map(|x| x.1).collect();
        assert_eq!(labels, vec![RayLabel::Plus, RayLabel::I, RayLabel::Minus]);
    }
}
