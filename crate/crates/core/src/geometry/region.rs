use serde::{Deserialize, Serialize};

use super::segment::{point_segment_distance, segment_segment_distance};
use super::winding::crossing_parity;
use super::{BBox, GeomError, GridSpec, PlaneCurve, Point, Raster};

/// A compact set of the plane in one of the supported discrete forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// A simple closed curve together with everything it encloses.
    Filled(PlaneCurve),
    /// The polyline itself (an arc, or a closed curve without its inside).
    Curve(PlaneCurve),
    Point(Point),
    Raster(Raster),
}

impl Region {
    pub fn filled(c: PlaneCurve) -> Result<Self, GeomError> {
        let r = Region::Filled(c);
        r.validate()?;
        Ok(r)
    }

    pub fn segment(a: Point, b: Point) -> Self {
        Region::Curve(PlaneCurve::segment(a, b))
    }

    /// Structural checks that deserialization alone cannot enforce.
    pub fn validate(&self) -> Result<(), GeomError> {
        match self {
            Region::Filled(c) => {
                if !c.is_closed() {
                    return Err(GeomError::InvalidRegion("filled region needs a closed curve".into()));
                }
                if let Some((i, j)) = c.first_self_intersection() {
                    return Err(GeomError::NotSimple(i, j));
                }
                Ok(())
            }
            Region::Curve(_) => Ok(()),
            Region::Point(p) => {
                if p.is_finite() {
                    Ok(())
                } else {
                    Err(GeomError::NonFinite)
                }
            }
            Region::Raster(r) => {
                if r.is_empty() {
                    Err(GeomError::InvalidRegion("empty raster".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn bbox(&self) -> BBox {
        match self {
            Region::Filled(c) | Region::Curve(c) => c.bbox(),
            Region::Point(p) => BBox::new(*p, *p),
            Region::Raster(r) => r.occupied_bbox().unwrap_or_else(|| r.spec.bbox()),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Region::Raster(r) => r.diameter(),
            _ => self.bbox().diameter(),
        }
    }

    /// Distance from `p` to the set (zero inside).
    pub fn distance(&self, p: Point) -> f64 {
        match self {
            Region::Filled(c) => {
                if crossing_parity(&c.vertices, p) {
                    0.0
                } else {
                    c.distance_to(p)
                }
            }
            Region::Curve(c) => c.distance_to(p),
            Region::Point(q) => p.dist(*q),
            Region::Raster(r) => {
                if r.contains(p) {
                    return 0.0;
                }
                // distance to the nearest occupied cell square
                let h = r.spec.h;
                r.occupied()
                    .map(|(i, j)| {
                        let c = r.spec.center(i, j);
                        let dx = ((p.x - c.x).abs() - h / 2.0).max(0.0);
                        let dy = ((p.y - c.y).abs() - h / 2.0).max(0.0);
                        dx.hypot(dy)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.distance(p) <= eps
    }

    /// Whether `p` is an interior point, at least `eps` away from the boundary.
    pub fn interior_contains(&self, p: Point, eps: f64) -> bool {
        match self {
            Region::Filled(c) => crossing_parity(&c.vertices, p) && c.distance_to(p) > eps,
            Region::Curve(_) | Region::Point(_) => false,
            Region::Raster(r) => {
                let Some((i, j)) = r.spec.cell_of(p) else { return false };
                let k = ((eps / r.spec.h).ceil() as isize).max(1);
                (-k..=k).all(|di| {
                    (-k..=k).all(|dj| {
                        let (a, b) = (i as isize + di, j as isize + dj);
                        a >= 0
                            && b >= 0
                            && (a as usize) < r.spec.nx
                            && (b as usize) < r.spec.ny
                            && r.get(a as usize, b as usize)
                    })
                })
            }
        }
    }

    /// Whether the segment `[a, b]` comes within `eps` of the set.
    pub fn segment_hits(&self, a: Point, b: Point, eps: f64) -> bool {
        match self {
            Region::Filled(c) => {
                crossing_parity(&c.vertices, a)
                    || crossing_parity(&c.vertices, b)
                    || c.segments().any(|(p, q)| segment_segment_distance(a, b, p, q) <= eps)
            }
            Region::Curve(c) => c.segments().any(|(p, q)| segment_segment_distance(a, b, p, q) <= eps),
            Region::Point(q) => point_segment_distance(*q, a, b) <= eps,
            Region::Raster(r) => {
                let step = r.spec.h / 4.0;
                let n = ((a.dist(b) / step).ceil() as usize).max(1);
                (0..=n).any(|k| self.contains(a.lerp(b, k as f64 / n as f64), eps))
            }
        }
    }

    /// Occupancy on the given grid.
    pub fn rasterize(&self, spec: GridSpec) -> Raster {
        match self {
            Region::Filled(c) => {
                let mut r = Raster::empty(spec);
                r.fill_polygon(&c.vertices);
                r.mark_polyline(&c.vertices, true);
                r
            }
            Region::Curve(c) => {
                let mut r = Raster::empty(spec);
                r.mark_polyline(&c.vertices, c.is_closed());
                r
            }
            Region::Point(p) => {
                let mut r = Raster::empty(spec);
                r.mark_segment(*p, *p);
                r
            }
            Region::Raster(src) => {
                if src.spec == spec {
                    return src.clone();
                }
                let mut r = Raster::empty(spec);
                let hh = src.spec.h / 2.0;
                for (i, j) in src.occupied() {
                    let c = src.spec.center(i, j);
                    // mark the cell square as a filled polygon plus outline
                    let sq = BBox::square(c, hh).corners();
                    r.fill_polygon(&sq);
                    r.mark_polyline(&sq, true);
                }
                r
            }
        }
    }

    /// Whether the complement of the set is connected.
    pub fn is_non_separating(&self, grid: usize) -> bool {
        match self {
            Region::Filled(_) | Region::Point(_) => true,
            Region::Curve(c) => {
                if c.is_closed() && c.is_simple() {
                    return false;
                }
                if !c.is_closed() && c.is_simple() {
                    return true;
                }
                let spec = default_spec(&self.bbox(), grid);
                !self.rasterize(spec).separates_plane()
            }
            Region::Raster(r) => !r.separates_plane(),
        }
    }

    /// Sample points spread over the set with spacing about `h`.
    pub fn sample(&self, h: f64) -> Vec<Point> {
        match self {
            Region::Filled(c) => {
                let mut pts = c.sample(h);
                let b = c.bbox();
                let nx = ((b.width() / h).ceil() as usize).max(1);
                let ny = ((b.height() / h).ceil() as usize).max(1);
                for j in 0..=ny {
                    for i in 0..=nx {
                        let p = Point::new(
                            b.min.x + b.width() * i as f64 / nx as f64,
                            b.min.y + b.height() * j as f64 / ny as f64,
                        );
                        if crossing_parity(&c.vertices, p) {
                            pts.push(p);
                        }
                    }
                }
                pts
            }
            Region::Curve(c) => c.sample(h),
            Region::Point(p) => vec![*p],
            Region::Raster(r) => r.occupied().map(|(i, j)| r.spec.center(i, j)).collect(),
        }
    }
}

/// Grid covering `b` with `grid` cells across its diameter and a small empty margin.
pub(crate) fn default_spec(b: &BBox, grid: usize) -> GridSpec {
    let h = b.diameter().max(1e-6) / grid.max(8) as f64;
    GridSpec::covering(b, h, 4).expect("default grid size is bounded")
}
