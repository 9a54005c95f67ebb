use std::f64::consts::TAU;

use num_complex::Complex64;
use planefix::geometry::{BBox, PlaneCurve, Point, Region};
use planefix::lamination::Angle;
use planefix::map_analysis::FixedKind;
use planefix::poly::Poly;
use planefix::polydyn::{
    classify_fixed, fixed_rays_at, impression_diameter_bound, piece_from_seed, pointdyn_harness, puzzle_piece_check,
    rational_angles, trace_ray, trace_rays, ExitSpec, HypothesisState, ImpressionVerdict, PointdynCase,
    PointdynInstance, PointdynVerdict, PolyDynError, PuzzleOptions, PuzzlePiece, RayOptions, H_RAYS,
};
use planefix::Tolerances;
use proptest::prelude::*;

fn z2() -> Poly {
    Poly::real(&[0.0, 0.0, 1.0]).unwrap()
}

fn cheb() -> Poly {
    Poly::real(&[-2.0, 0.0, 1.0]).unwrap()
}

fn basilica() -> Poly {
    Poly::real(&[-1.0, 0.0, 1.0]).unwrap()
}

fn ang(p: i64, q: i64) -> Angle {
    Angle::new(p, q).unwrap()
}

// Landing oracle for z^2: the escape coordinate is the identity.
fn circle_oracle(a: Angle) -> Point {
    Point::polar(1.0, TAU * a.to_f64())
}

// Landing oracle for z^2 - 2: conjugate to z^2 by w + 1/w.
fn chebyshev_oracle(a: Angle) -> Point {
    Point::new(2.0 * (TAU * a.to_f64()).cos(), 0.0)
}

fn check_landings(p: &Poly, oracle: fn(Angle) -> Point, qmax: i64) {
    let angles = rational_angles(qmax);
    let rays = trace_rays(p, &angles, &RayOptions::default()).unwrap();
    for r in rays {
        let x = r.landing().unwrap_or_else(|| panic!("ray {} unresolved: {:?}", r.angle, r.status));
        let err = x.dist(oracle(r.angle));
        assert!(err < 1e-6, "ray {} lands at {x:?}, error {err:e}", r.angle);
        assert!(r.max_residual < 1e-8, "ray {} residual {:e}", r.angle, r.max_residual);
    }
}

#[test]
fn z_squared_landing_matches_circle() {
    check_landings(&z2(), circle_oracle, 64);
}

#[test]
fn chebyshev_landing_matches_cosine() {
    check_landings(&cheb(), chebyshev_oracle, 64);
}

#[test]
fn ray_examples() {
    let opts = RayOptions::default();
    let r = trace_ray(&z2(), ang(1, 3), &opts).unwrap();
    assert!(r.landing().unwrap().dist(Point::polar(1.0, TAU / 3.0)) < 1e-9);
    let r = trace_ray(&cheb(), ang(0, 1), &opts).unwrap();
    assert!(r.landing().unwrap().dist(Point::new(2.0, 0.0)) < 1e-9);
}

#[test]
fn functional_equation_between_traced_rays() {
    // P maps the ray of theta onto the ray of 2 theta, one level coarser.
    let opts = RayOptions::default();
    for p in [z2(), cheb(), basilica()] {
        for a in [ang(1, 7), ang(3, 10), ang(5, 12)] {
            let r = trace_ray(&p, a, &opts).unwrap();
            let s = trace_ray(&p, a.sigma(2), &opts).unwrap();
            for (i, x) in r.points.iter().enumerate().skip(r.substeps) {
                let y = s.points[i - r.substeps];
                let px = Point::from_complex(p.eval(x.to_complex()));
                assert!(px.dist(y) / y.norm().max(1.0) < 1e-8, "angle {a} index {i}");
            }
        }
    }
}

#[test]
fn fixed_rays_examples() {
    let tol = Tolerances::default();
    let opts = RayOptions::default();
    let fr = fixed_rays_at(&z2(), Point::new(1.0, 0.0), 8, &opts, &tol).unwrap();
    assert_eq!(fr.angles, vec![ang(0, 1)]);
    assert!(fr.permutation);
    let fr = fixed_rays_at(&cheb(), Point::new(2.0, 0.0), 8, &opts, &tol).unwrap();
    assert_eq!(fr.angles, vec![ang(0, 1)]);
    let alpha = Point::new((1.0 - 5f64.sqrt()) / 2.0, 0.0);
    let fr = fixed_rays_at(&basilica(), alpha, 8, &opts, &tol).unwrap();
    assert_eq!(fr.angles, vec![ang(1, 3), ang(2, 3)]);
    assert!(fr.permutation && !fr.all_fixed(2));
    assert_eq!(fr.kind, FixedKind::Repelling);
}

#[test]
fn classify_fixed_examples() {
    let tol = Tolerances::default();
    let r = classify_fixed(&z2(), Point::new(1.0, 0.0), &tol).unwrap();
    assert_eq!((r.kind, r.multiplier), (FixedKind::Repelling, Some(Complex64::new(2.0, 0.0))));
    let r = classify_fixed(&z2(), Point::new(0.0, 0.0), &tol).unwrap();
    assert_eq!((r.kind, r.multiplier), (FixedKind::Attracting, Some(Complex64::new(0.0, 0.0))));
    let r = classify_fixed(&Poly::real(&[0.0, 1.0, 1.0]).unwrap(), Point::new(0.0, 0.0), &tol).unwrap();
    assert_eq!((r.kind, r.multiplier), (FixedKind::Parabolic, Some(Complex64::new(1.0, 0.0))));
}

#[test]
fn impression_of_fixed_ray_shrinks() {
    let rep = impression_diameter_bound(&z2(), ang(0, 1), 20, 1e-3, &RayOptions::default()).unwrap();
    assert!(matches!(rep.verdict, ImpressionVerdict::ConsistentWithDegenerate { .. }));
    assert!(rep.bound.windows(2).all(|w| w[1] <= w[0]));
    assert!(*rep.bound.last().unwrap() < 1e-3);
    // the neighborhood must contain the landing point 1 and the nearby arc of the circle
    let k = 10;
    assert!(rep.diameters[k - 1] > TAU * 2f64.powi(-(k as i32)));
}

#[test]
fn impression_at_chebyshev_endpoint() {
    let rep = impression_diameter_bound(&cheb(), ang(1, 2), 20, 1e-3, &RayOptions::default()).unwrap();
    assert!(matches!(rep.verdict, ImpressionVerdict::ConsistentWithDegenerate { .. }));
    let r = trace_ray(&cheb(), ang(1, 2), &RayOptions::default()).unwrap();
    assert!(r.landing().unwrap().dist(Point::new(-2.0, 0.0)) < 1e-9);
}

#[test]
fn impression_with_little_depth_is_unresolved() {
    let rep = impression_diameter_bound(&z2(), ang(0, 1), 3, 1e-3, &RayOptions::default()).unwrap();
    assert_eq!(rep.verdict, ImpressionVerdict::Unresolved);
}

fn basilica_alpha_exit() -> ExitSpec {
    ExitSpec { e: Region::Point(Point::new((1.0 - 5f64.sqrt()) / 2.0, 0.0)), angles: vec![ang(1, 3), ang(2, 3)] }
}

#[test]
fn basilica_puzzle_piece() {
    let opts = PuzzleOptions::default();
    let exits = vec![basilica_alpha_exit()];
    let scene = BBox::new(Point::new(-2.0, -1.5), Point::new(2.0, 1.5));
    let x = piece_from_seed(&basilica(), &exits, Point::new(0.0, 0.0), &scene, &opts).unwrap();
    let piece = PuzzlePiece { x, exits };
    let rep = puzzle_piece_check(&basilica(), &piece, &opts).unwrap();
    assert_eq!(rep.exits[0].wedge_count, 2);
    assert!(rep.exits[0].wedge_cells > 0);
}

#[test]
fn rays_outside_exit_fail_condition_two() {
    let opts = PuzzleOptions::default();
    let exits = vec![ExitSpec { e: Region::Point(Point::new(0.3, 0.0)), angles: vec![ang(1, 3), ang(2, 3)] }];
    let x = Region::filled(PlaneCurve::rectangle(&BBox::new(Point::new(-0.5, -0.5), Point::new(0.5, 0.5)))).unwrap();
    let err = puzzle_piece_check(&basilica(), &PuzzlePiece { x, exits }, &opts).unwrap_err();
    assert!(matches!(err, PolyDynError::ConditionFailed(2, _)), "{err:?}");
}

#[test]
fn no_exits_with_whole_filled_set_passes() {
    let opts = PuzzleOptions::default();
    let scene = BBox::new(Point::new(-2.0, -1.5), Point::new(2.0, 1.5));
    let x = piece_from_seed(&basilica(), &[], Point::new(0.0, 0.0), &scene, &opts).unwrap();
    let rep = puzzle_piece_check(&basilica(), &PuzzlePiece { x, exits: vec![] }, &opts).unwrap();
    assert!(rep.exits.is_empty());
}

#[test]
fn pointdyn_chebyshev_interval_violates_ray_hypothesis() {
    let inst = PointdynInstance {
        x: Region::segment(Point::new(-2.0, 0.0), Point::new(2.0, 0.0)),
        case: PointdynCase::Invariant,
        qmax: 8,
    };
    let rep = pointdyn_harness(&cheb(), &inst, &PuzzleOptions::default(), &Tolerances::default()).unwrap();
    assert_eq!(rep.verdict, PointdynVerdict::HypothesisViolated { names: vec![H_RAYS.to_string()] });
    let h = rep.hypotheses.iter().find(|h| h.name == H_RAYS).unwrap();
    assert_eq!(h.state, HypothesisState::Fails);
    assert!(h.detail.contains("1/3 -> 2/3") && h.detail.contains("2/3 -> 1/3"), "{}", h.detail);
    assert!(h.detail.contains("(-1.000000, 0.000000)"), "{}", h.detail);
}

#[test]
fn pointdyn_unit_circle_is_not_applicable() {
    let inst = PointdynInstance {
        x: Region::Curve(PlaneCurve::circle(Point::new(0.0, 0.0), 1.0, 256)),
        case: PointdynCase::Invariant,
        qmax: 8,
    };
    let rep = pointdyn_harness(&z2(), &inst, &PuzzleOptions::default(), &Tolerances::default()).unwrap();
    assert!(matches!(rep.verdict, PointdynVerdict::NotApplicable { .. }));
}

#[test]
fn pointdyn_degenerate_impression_is_consistent() {
    let inst = PointdynInstance { x: Region::Point(Point::new(1.0, 0.0)), case: PointdynCase::Invariant, qmax: 8 };
    let rep = pointdyn_harness(&z2(), &inst, &PuzzleOptions::default(), &Tolerances::default()).unwrap();
    assert_eq!(rep.verdict, PointdynVerdict::Consistent);
    assert!(rep.warning.is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // Conjugating z^2 + c by an affine map moves landing points along with it.
    #[test]
    fn affine_conjugation_moves_landing_points(
        c in -1.2f64..0.2,
        s in 0.5f64..2.0,
        rot in -0.6f64..0.6,
        bx in -1.0f64..1.0,
        by in -1.0f64..1.0,
        k in 0usize..6,
    ) {
        let p = Poly::real(&[c, 0.0, 1.0]).unwrap();
        let al = Complex64::from_polar(s, rot);
        let be = Complex64::new(bx, by);
        // Pt(y) = al P((y - be) / al) + be
        let pt = p.compose_affine(1.0 / al, -be / al).scale(al).add_constant(be);
        let a = [ang(0, 1), ang(1, 3), ang(1, 5), ang(1, 7), ang(2, 7), ang(3, 7)][k];
        let opts = RayOptions::default();
        let r = trace_ray(&p, a, &opts).unwrap();
        let rt = trace_ray(&pt, a, &opts).unwrap();
        if let (Some(x), Some(y)) = (r.landing(), rt.landing()) {
            let mapped = Point::from_complex(al * x.to_complex() + be);
            prop_assert!(mapped.dist(y) < 1e-6, "{mapped:?} vs {y:?}");
        } else {
            prop_assert_eq!(r.landing().is_some(), rt.landing().is_some());
        }
    }

    // Landing rays at a fixed point are permuted by doubling.
    #[test]
    fn fixed_rays_form_a_permutation(c in -1.3f64..0.2) {
        let p = Poly::real(&[c, 0.0, 1.0]).unwrap();
        let beta = Point::new((1.0 + (1.0 - 4.0 * c).sqrt()) / 2.0, 0.0);
        let fr = fixed_rays_at(&p, beta, 6, &RayOptions::default(), &Tolerances::default()).unwrap();
        prop_assert!(fr.permutation, "{:?}", fr.fault);
        prop_assert_eq!(fr.angles, vec![ang(0, 1)]);
    }
}

#[test]
fn pointdyn_basilica_piece_at_alpha() {
    let opts = PuzzleOptions::default();
    let exits = vec![basilica_alpha_exit()];
    let scene = BBox::new(Point::new(-2.0, -1.5), Point::new(2.0, 1.5));
    let x = piece_from_seed(&basilica(), &exits, Point::new(0.0, 0.0), &scene, &opts).unwrap();
    let inst = PointdynInstance { x, case: PointdynCase::Puzzle { exits }, qmax: 6 };
    let rep = pointdyn_harness(&basilica(), &inst, &opts, &Tolerances::default()).unwrap();
    for name in ["X is a general puzzle-piece", "each exit maps into its wedge or is a fixed point"] {
        let h = rep.hypotheses.iter().find(|h| h.name == name).unwrap();
        assert_eq!(h.state, HypothesisState::Holds, "{}: {}", h.name, h.detail);
    }
    assert_eq!(rep.verdict, PointdynVerdict::HypothesisViolated { names: vec![H_RAYS.to_string()] });
}
