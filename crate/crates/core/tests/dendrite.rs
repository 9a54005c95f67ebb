use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use planefix::dendrite::*;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

/// Y-tree: center c = 0 with leaves a = 1, b = 2, d = 3.
fn y_tree() -> Tree {
    Tree::new(labels(&["c", "a", "b", "d"]), vec![(0, 1), (0, 2), (0, 3)]).unwrap()
}

/// `[-1, 2]` with vertices at -1, 0, 1, 2.
fn long_interval() -> Tree {
    Tree::path(vec![q(1, 1), q(1, 1), q(1, 1)])
}

fn tent_point(x: BigRational) -> TreePoint {
    let t = full_tent().tree;
    if x <= q(1, 2) {
        t.point(0, x * q(2, 1)).unwrap()
    } else {
        t.point(1, (x - q(1, 2)) * q(2, 1)).unwrap()
    }
}

#[test]
fn boundary_sets() {
    let t = y_tree();
    assert_eq!(boundary_set(&t, &set(&[0, 1])), vec![TreePoint::Vertex(0)]);
    assert!(boundary_set(&t, &set(&[0, 1, 2, 3])).is_empty());
    let p = Tree::path(vec![q(1, 3), q(1, 3), q(1, 3)]);
    assert_eq!(boundary_set(&p, &set(&[1, 2])), vec![TreePoint::Vertex(1), TreePoint::Vertex(2)]);
}

#[test]
fn retraction_examples() {
    let t = y_tree();
    let d1 = set(&[0, 1]);
    let x = t.point(1, q(1, 3)).unwrap();
    assert_eq!(retract(&t, &d1, &x), TreePoint::Vertex(0));
    let y = t.point(0, q(2, 3)).unwrap();
    assert_eq!(retract(&t, &d1, &y), y);

    let images = BTreeMap::from([(0, TreePoint::Vertex(1)), (1, t.point(1, q(1, 2)).unwrap())]);
    let f = TreeMap::from_vertex_images(t.clone(), d1.clone(), set(&[0, 1, 2, 3]), images).unwrap();
    let g = f.retracted();
    assert!(g.is_self_map());
    assert_eq!(g.eval(&TreePoint::Vertex(1)).unwrap(), TreePoint::Vertex(0));
}

#[test]
fn scrambling_examples() {
    let t = y_tree();
    let all = set(&[0, 1, 2, 3]);
    let d1 = set(&[0, 1]);
    let with_c = |img: TreePoint| {
        let images = BTreeMap::from([(0, img), (1, TreePoint::Vertex(0))]);
        TreeMap::from_vertex_images(t.clone(), d1.clone(), all.clone(), images).unwrap()
    };
    assert!(scrambles_boundary(&with_c(t.point(0, q(1, 2)).unwrap())).unwrap());
    assert!(!scrambles_boundary(&with_c(t.point(1, q(1, 2)).unwrap())).unwrap());
    assert!(scrambles_boundary(&with_c(TreePoint::Vertex(0))).unwrap());
}

#[test]
fn fixed_point_examples() {
    let unit = Tree::path(vec![q(1, 1)]);
    let flip = TreeMap::self_map(unit.clone(), BTreeMap::from([(0, TreePoint::Vertex(1)), (1, TreePoint::Vertex(0))]))
        .unwrap();
    let fx = fixed_points(&flip);
    assert_eq!(fx.points, vec![unit.point(0, q(1, 2)).unwrap()]);
    assert!(fx.segments.is_empty());

    let id = TreeMap::self_map(unit.clone(), BTreeMap::from([(0, TreePoint::Vertex(0)), (1, TreePoint::Vertex(1))]))
        .unwrap();
    let fx = fixed_points(&id);
    assert!(fx.points.is_empty());
    assert_eq!(fx.segments, vec![FixedSegment { edge: 0, t0: q(0, 1), t1: q(1, 1) }]);

    let halve = TreeMap::self_map(
        unit.clone(),
        BTreeMap::from([(0, TreePoint::Vertex(0)), (1, unit.point(0, q(1, 2)).unwrap())]),
    )
    .unwrap();
    assert_eq!(fixed_points(&halve).points, vec![TreePoint::Vertex(0)]);
}

fn triple_minus_one() -> TreeMap {
    let t = long_interval();
    let images = BTreeMap::from([(1, TreePoint::Vertex(0)), (2, TreePoint::Vertex(3))]);
    TreeMap::from_vertex_images(t, set(&[1, 2]), set(&[0, 1, 2, 3]), images).unwrap()
}

#[test]
fn fixed_in_arc_examples() {
    let f = triple_minus_one();
    let c = fixed_in_arc(&f, &TreePoint::Vertex(1), &TreePoint::Vertex(2)).unwrap();
    assert_eq!(c, f.tree.point(1, q(1, 2)).unwrap());

    let unit = Tree::path(vec![q(1, 1)]);
    let halve = TreeMap::self_map(
        unit.clone(),
        BTreeMap::from([(0, TreePoint::Vertex(0)), (1, unit.point(0, q(1, 2)).unwrap())]),
    )
    .unwrap();
    assert!(matches!(
        fixed_in_arc(&halve, &TreePoint::Vertex(0), &TreePoint::Vertex(1)),
        Err(DendriteError::HypothesisFailed(_))
    ));

    // Y-tree with arms a1-a2 and b1-b2; the map pushes a1 and b1 outward.
    let t =
        Tree::new(labels(&["c", "a1", "a2", "b1", "b2", "d"]), vec![(0, 1), (1, 2), (0, 3), (3, 4), (0, 5)]).unwrap();
    let images = BTreeMap::from([
        (0, TreePoint::Vertex(0)),
        (1, TreePoint::Vertex(2)),
        (3, TreePoint::Vertex(4)),
        (5, TreePoint::Vertex(0)),
    ]);
    let f = TreeMap::from_vertex_images(t, set(&[0, 1, 3, 5]), set(&[0, 1, 2, 3, 4, 5]), images).unwrap();
    assert_eq!(fixed_in_arc(&f, &TreePoint::Vertex(1), &TreePoint::Vertex(3)).unwrap(), TreePoint::Vertex(0));
}

#[test]
fn weak_repelling_examples() {
    let f = triple_minus_one();
    let p = f.tree.point(1, q(1, 2)).unwrap();
    let w = weakly_repelling(&f, &p, 1).unwrap().unwrap();
    let WitnessKind::Separating { x, image } = &w.kind else { panic!("expected a separating witness") };
    assert!(f.tree.separates(x, &p, image));

    let unit = Tree::path(vec![q(1, 1)]);
    let halve = TreeMap::self_map(
        unit.clone(),
        BTreeMap::from([(0, TreePoint::Vertex(0)), (1, unit.point(0, q(1, 2)).unwrap())]),
    )
    .unwrap();
    assert_eq!(weakly_repelling(&halve, &TreePoint::Vertex(0), 1).unwrap(), None);

    // f² flips the two sides of 2/5 (derivative -4), so the witness needs f⁴
    let tent = full_tent();
    let p = tent_point(q(2, 5));
    assert_eq!(weakly_repelling(&tent, &p, 2).unwrap(), None);
    assert!(weakly_repelling(&tent, &p, 4).unwrap().is_some());
    assert_eq!(weakly_repelling(&tent, &p, 1), Err(DendriteError::NotFixed));
}

#[test]
fn tent_periodic_cutpoints() {
    let tent = full_tent();
    let r = periodic_cutpoints(&tent, 3).unwrap();
    assert_eq!(r.fixed_counts, vec![2, 4, 8]);
    assert!(!r.non_isolated);
    let by_n = |n: usize| r.cutpoints.iter().filter(|c| c.period <= n).count();
    assert_eq!((by_n(1), by_n(2), by_n(3)), (1, 3, 9));
    let periods: BTreeMap<TreePoint, usize> = r.cutpoints.iter().map(|c| (c.point.clone(), c.period)).collect();
    assert_eq!(periods[&tent_point(q(2, 3))], 1);
    assert_eq!(periods[&tent_point(q(2, 5))], 2);
    assert_eq!(periods[&tent_point(q(4, 5))], 2);
    assert_eq!(periods[&tent_point(q(2, 9))], 3);
}

#[test]
fn tent_fixed_counts_match_transfer_matrix() {
    // both laps of the tent cover [0, 1]: M = [[1, 1], [1, 1]], trace M^n = 2^n
    let tent = full_tent();
    let r = periodic_cutpoints(&tent, 6).unwrap();
    let mut m = [[1u64, 1], [1, 1]];
    for (n, &count) in r.fixed_counts.iter().enumerate() {
        assert_eq!(count as u64, m[0][0] + m[1][1], "n = {}", n + 1);
        m = [[m[0][0] + m[0][1], m[0][0] + m[0][1]], [m[1][0] + m[1][1], m[1][0] + m[1][1]]];
    }
}

#[test]
fn constant_map_to_leaf_has_no_periodic_cutpoints() {
    let t = y_tree();
    let images = (0..4).map(|v| (v, TreePoint::Vertex(1))).collect();
    let f = TreeMap::self_map(t, images).unwrap();
    assert!(periodic_cutpoints(&f, 3).unwrap().cutpoints.is_empty());
}

// ---- generated maps ----

#[derive(Debug, Clone)]
struct Case {
    parents: Vec<usize>,
    d1_size: usize,
    images: Vec<(bool, usize, i64)>,
}

fn case() -> impl Strategy<Value = Case> {
    (3usize..9).prop_flat_map(|n| {
        let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
        (parents, 2..=n, proptest::collection::vec((any::<bool>(), 0..n, 1i64..8), n))
            .prop_map(|(parents, d1_size, images)| Case { parents, d1_size, images })
    })
}

fn build(c: &Case) -> TreeMap {
    let n = c.parents.len() + 1;
    let edges: Vec<(usize, usize)> = c.parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
    let tree = Tree::new((0..n).map(|i| format!("v{i}")).collect(), edges).unwrap();
    // vertex order is a BFS-compatible order, so any prefix is connected
    let d1: BTreeSet<usize> = (0..c.d1_size).collect();
    let images = (0..c.d1_size)
        .map(|v| {
            let (on_edge, k, num) = c.images[v];
            let p = if on_edge { tree.point(k % (n - 1), q(num, 8)).unwrap() } else { TreePoint::Vertex(k) };
            (v, p)
        })
        .collect();
    TreeMap::from_vertex_images(tree, d1, (0..n).collect(), images).unwrap()
}

fn position(t: &Tree, p: &TreePoint) -> (String, String, BigRational) {
    match p {
        TreePoint::Vertex(v) => (t.labels[*v].clone(), String::new(), q(0, 1)),
        TreePoint::Edge { edge, t: s } => {
            let (a, b) = t.edges[*edge];
            let (la, lb) = (t.labels[a].clone(), t.labels[b].clone());
            if la < lb {
                (la, lb, s.clone())
            } else {
                (lb, la, q(1, 1) - s)
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retraction_is_idempotent_and_fixes_the_subtree(c in case(), e in 0usize..8, num in 0i64..=8) {
        let f = build(&c);
        let t = &f.tree;
        let x = t.point(e % t.edges.len(), q(num, 8)).unwrap();
        let r = retract(t, &f.domain, &x);
        prop_assert_eq!(retract(t, &f.domain, &r), r.clone());
        prop_assert!(f.in_domain(&r));
        if f.in_domain(&x) {
            prop_assert_eq!(r, x.clone());
        }
        if f.in_domain(&x) {
            let fx = f.eval(&x).unwrap();
            if f.in_domain(&fx) {
                prop_assert_eq!(f.retracted().eval(&x).unwrap(), fx);
            }
        }
    }

    #[test]
    fn scrambling_maps_have_a_fixed_point_off_the_boundary(c in case()) {
        let f = build(&c);
        prop_assume!(scrambles_boundary(&f).unwrap());
        let e = boundary_set(&f.tree, &f.domain);
        if e.iter().any(|p| f.eval(p).unwrap() == *p) {
            // a fixed boundary point is already the fixed point
            return Ok(());
        }
        let g = f.retracted();
        let fixed = fixed_points(&g);
        let mut found = fixed.points.iter().find(|p| !e.contains(p)).cloned();
        if found.is_none() {
            if let Some(s) = fixed.segments.first() {
                found = Some(f.tree.point(s.edge, (&s.t0 + &s.t1) * q(1, 2)).unwrap());
            }
        }
        let p = found.expect("a fixed point of the retracted map off the boundary");
        prop_assert_eq!(f.eval(&p).unwrap(), p);
    }

    #[test]
    fn fixed_in_arc_lies_strictly_inside(c in case()) {
        let f = build(&c);
        let vs: Vec<usize> = f.domain.iter().copied().collect();
        for &a in &vs {
            for &b in &vs {
                let (pa, pb) = (TreePoint::Vertex(a), TreePoint::Vertex(b));
                if a == b || !f.tree.separates(&pa, &f.eval(&pa).unwrap(), &pb)
                    || !f.tree.separates(&pb, &f.eval(&pb).unwrap(), &pa) {
                    continue;
                }
                let x = fixed_in_arc(&f, &pa, &pb).unwrap();
                prop_assert!(f.tree.separates(&x, &pa, &pb));
                prop_assert!(f.domain_valence(&x) >= 2);
                prop_assert_eq!(f.eval(&x).unwrap(), x);
            }
        }
    }

    #[test]
    fn fixed_sets_do_not_depend_on_edge_order(c in case(), rot in 0usize..8, flip in any::<u8>()) {
        let f = build(&c);
        let t = &f.tree;
        let m = t.edges.len();
        let perm: Vec<usize> = (0..m).map(|i| (i + rot) % m).collect();
        let flipped = |i: usize| flip >> (i % 8) & 1 == 1;
        let edges = perm.iter().enumerate().map(|(i, &old)| {
            let (a, b) = t.edges[old];
            if flipped(i) { (b, a) } else { (a, b) }
        }).collect();
        let t2 = Tree::new(t.labels.clone(), edges).unwrap();
        let moved = |p: &TreePoint| match p {
            TreePoint::Vertex(v) => TreePoint::Vertex(*v),
            TreePoint::Edge { edge, t: s } => {
                let i = perm.iter().position(|&o| o == *edge).unwrap();
                t2.point(i, if flipped(i) { q(1, 1) - s } else { s.clone() }).unwrap()
            }
        };
        let images = f.vertex_images.iter().map(|(&v, p)| (v, moved(p))).collect();
        let f2 = TreeMap::from_vertex_images(t2.clone(), f.domain.clone(), f.codomain.clone(), images).unwrap();
        let a: BTreeSet<_> = fixed_points(&f).points.iter().map(|p| position(t, p)).collect();
        let b: BTreeSet<_> = fixed_points(&f2).points.iter().map(|p| position(&t2, p)).collect();
        prop_assert_eq!(a, b);
    }
}
