#![allow(dead_code)]

use std::f64::consts::PI;

use planefix::geometry::{PlaneCurve, Point, Region};

pub fn segment_x() -> Region {
    Region::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0))
}

/// Simple closed curve around `[-1, 1]` touching it from above at `±0.3` and
/// from below at `±0.25`, counterclockwise.
pub fn pinched_stadium() -> PlaneCurve {
    let mut v = vec![Point::new(0.25, 0.0), Point::new(0.6, -0.3)];
    for k in 0..=16 {
        let t = -PI / 2.0 + PI * k as f64 / 16.0;
        v.push(Point::new(1.0, 0.0) + Point::polar(0.3, t));
    }
    v.extend([
        Point::new(0.6, 0.3),
        Point::new(0.3, 0.0),
        Point::new(0.15, 0.12),
        Point::new(0.0, 0.15),
        Point::new(-0.15, 0.12),
        Point::new(-0.3, 0.0),
        Point::new(-0.6, 0.3),
    ]);
    for k in 0..=16 {
        let t = PI / 2.0 + PI * k as f64 / 16.0;
        v.push(Point::new(-1.0, 0.0) + Point::polar(0.3, t));
    }
    v.extend([
        Point::new(-0.6, -0.3),
        Point::new(-0.25, 0.0),
        Point::new(-0.12, -0.1),
        Point::new(0.0, -0.12),
        Point::new(0.12, -0.1),
    ]);
    PlaneCurve::closed(v).unwrap()
}
