use std::f64::consts::TAU;

use planefix::geometry::{in_hull, shadow, winding_number, PlaneCurve, Point, Region};
use proptest::prelude::*;

/// Star-shaped polygon around `c` with the given radii at equal angles.
fn star(c: Point, radii: &[f64]) -> PlaneCurve {
    let n = radii.len();
    let v = radii.iter().enumerate().map(|(k, &r)| c + Point::polar(r, TAU * k as f64 / n as f64)).collect();
    PlaneCurve::closed(v).unwrap()
}

/// Even-odd crossing test, kept independent of the library's winding code.
fn inside_polygon(v: &[Point], p: Point) -> bool {
    let mut inside = false;
    for i in 0..v.len() {
        let (a, b) = (v[i], v[(i + 1) % v.len()]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            inside = !inside;
        }
    }
    inside
}

/// Arc over `[-1, 1]` from `(x1, 0)` up through the given heights to `(x0, 0)`.
fn bump(x0: f64, x1: f64, heights: &[f64]) -> PlaneCurve {
    let n = heights.len() + 1;
    let mut v = vec![Point::new(x1, 0.0)];
    for (k, &h) in heights.iter().enumerate() {
        v.push(Point::new(x1 + (x0 - x1) * (k + 1) as f64 / n as f64, h));
    }
    v.push(Point::new(x0, 0.0));
    PlaneCurve::open(v).unwrap()
}

#[test]
fn winding_examples() {
    let c = PlaneCurve::circle(Point::ORIGIN, 1.0, 64);
    assert_eq!(winding_number(&c, Point::ORIGIN, 1e-9).unwrap(), 1);
    assert_eq!(winding_number(&c.reversed(), Point::ORIGIN, 1e-9).unwrap(), -1);
    assert_eq!(winding_number(&c, Point::new(3.0, 0.0), 1e-9).unwrap(), 0);
    assert!(winding_number(&c, Point::new(1.0, 0.0), 1e-9).is_err());
}

#[test]
fn shadow_of_semicircle_over_segment() {
    let x = Region::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
    let a = PlaneCurve::circular_arc(Point::ORIGIN, 0.5, 0.0, std::f64::consts::PI, 64);
    let h = 1.0 / 128.0;
    let sh = shadow(&x, &a, h, 1e-9).unwrap();
    // a half disk of radius 1/2, up to cells cut by the boundary
    let area = sh.count() as f64 * h * h;
    let exact = std::f64::consts::PI / 8.0;
    assert!((area - exact).abs() < 0.05 * exact, "area {area}");
    assert!(sh.contains(Point::new(0.0, 0.25)));
    assert!(!sh.contains(Point::new(0.0, -0.25)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winding_is_invariant_under_rotation_and_refinement(
        radii in proptest::collection::vec(0.5f64..1.5, 5..20),
        cx in -1.0f64..1.0, cy in -1.0f64..1.0,
        wx in -2.5f64..2.5, wy in -2.5f64..2.5,
        k in 0usize..20,
    ) {
        let s = star(Point::new(cx, cy), &radii);
        let w = Point::new(wx, wy);
        prop_assume!(s.distance_to(w) > 1e-3);
        let n = winding_number(&s, w, 1e-9).unwrap();
        prop_assert_eq!(n, inside_polygon(&s.vertices, w) as i64);
        prop_assert_eq!(winding_number(&s.rotated(k % radii.len()), w, 1e-9).unwrap(), n);
        prop_assert_eq!(winding_number(&s.refined(), w, 1e-9).unwrap(), n);
        prop_assert_eq!(winding_number(&s.reversed(), w, 1e-9).unwrap(), -n);
    }

    #[test]
    fn in_hull_survives_refinement(
        radii in proptest::collection::vec(0.5f64..1.5, 5..20),
        wx in -2.0f64..2.0, wy in -2.0f64..2.0,
    ) {
        let s = star(Point::ORIGIN, &radii);
        let w = Point::new(wx, wy);
        prop_assume!(s.distance_to(w) > 1e-6);
        let a = in_hull(&s, w, 1e-9).unwrap();
        prop_assert_eq!(in_hull(&s.refined(), w, 1e-9).unwrap(), a);
        prop_assert_eq!(in_hull(&s.refined().refined(), w, 1e-9).unwrap(), a);
    }

    #[test]
    fn shadow_stays_off_the_unbounded_component(
        x0 in -0.9f64..-0.1, x1 in 0.1f64..0.9,
        heights in proptest::collection::vec(0.05f64..1.0, 1..6),
    ) {
        let x = Region::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let a = bump(x0, x1, &heights);
        let h = 1.0 / 64.0;
        let sh = shadow(&x, &a, h, 1e-9).unwrap();
        prop_assert!(!sh.is_empty());
        let closed = a.vertices.clone();
        for (i, j) in sh.occupied() {
            let p = sh.spec.center(i, j);
            // cells cut by the arc may go either way
            if a.distance_to(p) > h && x.distance(p) > h {
                prop_assert!(inside_polygon(&closed, p), "shadow cell {:?} is outside", p);
            }
        }
    }
}
