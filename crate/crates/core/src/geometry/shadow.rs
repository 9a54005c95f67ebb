use super::{BBox, GeomError, GridSpec, PlaneCurve, Raster, Region};

fn blocked_raster(x: &Region, a: &PlaneCurve, h: f64) -> Result<Raster, GeomError> {
    let b: BBox = x.bbox().union(&a.bbox());
    let spec = GridSpec::covering(&b, h, 4)?;
    let mut r = x.rasterize(spec);
    r.mark_polyline(&a.vertices, a.is_closed());
    Ok(r)
}

fn check_arc(x: &Region, a: &PlaneCurve, h: f64, eps: f64) -> Result<(), GeomError> {
    let len = a.length();
    // stay clear of the endpoints, which lie on the boundary of X
    let guard = (2.0 * h).min(len / 4.0);
    for p in a.sample(h / 2.0) {
        let s = a.project(p);
        if s < guard || s > len - guard {
            continue;
        }
        if x.interior_contains(p, eps) {
            return Err(GeomError::ArcEntersInterior(p));
        }
    }
    Ok(())
}

/// Union of the bounded components of the complement of `X ∪ A`, on a grid
/// of cell size `h`.
pub fn shadow(x: &Region, a: &PlaneCurve, h: f64, eps: f64) -> Result<Raster, GeomError> {
    check_arc(x, a, h, eps)?;
    Ok(blocked_raster(x, a, h)?.bounded_complement())
}

/// Whether a crosscut `q` and a ray landing on `X` cross essentially: some
/// initial piece of the ray, measured from its landing point (its last
/// vertex), lies in the shadow of `q`.
pub fn crosses_essentially(x: &Region, q: &PlaneCurve, ray: &PlaneCurve, h: f64, eps: f64) -> Result<bool, GeomError> {
    check_arc(x, q, h, eps)?;
    let blocked = blocked_raster(x, q, h)?;
    let sh = blocked.bounded_complement();
    let back = ray.reversed();
    for p in back.sample(h / 2.0) {
        match blocked.spec.cell_of(p) {
            None => return Ok(false),
            Some((i, j)) if blocked.get(i, j) => continue,
            Some((i, j)) => return Ok(sh.get(i, j)),
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use std::f64::consts::PI;

    fn disk() -> Region {
        Region::Filled(PlaneCurve::circle(Point::ORIGIN, 1.0, 256))
    }

    fn tall_arc() -> PlaneCurve {
        // from (1,0) up through (0,2) to (-1,0)
        let pts = (0..=64)
            .map(|k| {
                let t = PI * k as f64 / 64.0;
                Point::new(t.cos(), 2.0 * t.sin())
            })
            .collect();
        PlaneCurve::open(pts).unwrap()
    }

    #[test]
    fn shadow_above_disk() {
        let sh = shadow(&disk(), &tall_arc(), 4.0 / 512.0, 1e-6).unwrap();
        assert!(sh.contains(Point::new(0.0, 1.5)));
        assert!(!sh.contains(Point::new(0.0, -1.5)));
        assert!(!sh.contains(Point::new(0.0, 2.5)));
    }

    #[test]
    fn arc_on_boundary_has_empty_shadow() {
        let c = PlaneCurve::circle(Point::ORIGIN, 1.0, 256);
        let a = c.subarc(0.0, PI);
        let sh = shadow(&Region::Filled(c), &a, 2.0 / 512.0, 1e-6).unwrap();
        assert!(sh.is_empty());
    }

    #[test]
    fn arc_through_disk_is_rejected() {
        let a = PlaneCurve::segment(Point::new(1.0, 0.0), Point::new(-1.0, 0.0));
        assert!(matches!(shadow(&disk(), &a, 0.01, 1e-6), Err(GeomError::ArcEntersInterior(_))));
    }

    #[test]
    fn descending_ray_crosses_essentially() {
        let ray = PlaneCurve::segment(Point::new(0.0, 5.0), Point::new(0.0, 1.0));
        assert!(crosses_essentially(&disk(), &tall_arc(), &ray, 4.0 / 512.0, 1e-6).unwrap());
        // a ray landing at the bottom of the disk misses the shadow
        let below = PlaneCurve::segment(Point::new(0.0, -5.0), Point::new(0.0, -1.0));
        assert!(!crosses_essentially(&disk(), &tall_arc(), &below, 4.0 / 512.0, 1e-6).unwrap());
    }
}
