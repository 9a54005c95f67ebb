use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::map::edges_within;
use super::{qstr, DendriteError, PieceImage, Tree, TreeMap, TreePoint, Q};

/// Scale halvings tried by [`weakly_repelling`].
pub const WEAK_REPEL_DEPTH: u32 = 40;

/// Nearest vertex of `d1` for every vertex of the tree.
fn attachments(tree: &Tree, d1: &BTreeSet<usize>) -> Vec<usize> {
    let mut att = vec![usize::MAX; tree.num_vertices()];
    let mut queue: std::collections::VecDeque<usize> = d1.iter().copied().collect();
    for &v in d1 {
        att[v] = v;
    }
    while let Some(v) = queue.pop_front() {
        for &e in tree.incident(v) {
            let w = tree.other_end(e, v);
            if att[w] == usize::MAX {
                att[w] = att[v];
                queue.push_back(w);
            }
        }
    }
    att
}

fn retract_with(tree: &Tree, d1: &BTreeSet<usize>, att: &[usize], x: &TreePoint) -> TreePoint {
    match x {
        TreePoint::Vertex(v) => TreePoint::Vertex(att[*v]),
        TreePoint::Edge { edge, .. } => {
            let (a, b) = tree.edges[*edge];
            match (d1.contains(&a), d1.contains(&b)) {
                (true, true) => x.clone(),
                (true, false) => TreePoint::Vertex(a),
                (false, true) => TreePoint::Vertex(b),
                (false, false) => TreePoint::Vertex(att[a]),
            }
        }
    }
}

/// Monotone retraction of the tree onto the subtree spanned by `d1`: the
/// first point of the subtree on the arc from `x` to it.
pub fn retract(tree: &Tree, d1: &BTreeSet<usize>, x: &TreePoint) -> TreePoint {
    retract_with(tree, d1, &attachments(tree, d1), x)
}

/// Points of `d1` where the rest of the tree is attached.
pub fn boundary_set(tree: &Tree, d1: &BTreeSet<usize>) -> Vec<TreePoint> {
    d1.iter()
        .filter(|&&v| tree.incident(v).iter().any(|&e| !d1.contains(&tree.other_end(e, v))))
        .map(|&v| TreePoint::Vertex(v))
        .collect()
}

impl TreeMap {
    /// `r ∘ f`, a self-map of the domain.
    pub fn retracted(&self) -> TreeMap {
        let tree = &self.tree;
        let att = attachments(tree, &self.domain);
        let inside: BTreeSet<usize> = edges_within(tree, &self.domain).into_iter().collect();
        let mut g = self.map_images(self.domain.clone(), |img| match img {
            PieceImage::Point(p) => PieceImage::Point(retract_with(tree, &self.domain, &att, p)),
            PieceImage::Linear { edge, .. } if inside.contains(edge) => img.clone(),
            PieceImage::Linear { edge, .. } => {
                let mid = TreePoint::Edge { edge: *edge, t: Q::new(1.into(), 2.into()) };
                PieceImage::Point(retract_with(tree, &self.domain, &att, &mid))
            }
        });
        for p in g.vertex_images.values_mut() {
            *p = retract_with(tree, &self.domain, &att, p);
        }
        g
    }
}

/// Each non-fixed point `e` of the boundary set is sent into a component of
/// the tree minus `e` that meets the domain.
pub fn scrambles_boundary(f: &TreeMap) -> Result<bool, DendriteError> {
    for e in boundary_set(&f.tree, &f.domain) {
        let fe = f.eval(&e)?;
        if fe == e {
            continue;
        }
        let (edge, _) = f.tree.direction(&e, &fe).expect("distinct points");
        let TreePoint::Vertex(v) = e else { unreachable!("boundary points are vertices") };
        if !f.domain.contains(&f.tree.other_end(edge, v)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixedSegment {
    pub edge: usize,
    #[serde(with = "qstr")]
    pub t0: Q,
    #[serde(with = "qstr")]
    pub t1: Q,
}

impl FixedSegment {
    fn contains(&self, tree: &Tree, p: &TreePoint) -> bool {
        match p {
            TreePoint::Edge { edge, t } => *edge == self.edge && self.t0 <= *t && *t <= self.t1,
            TreePoint::Vertex(v) => {
                let (a, b) = tree.edges[self.edge];
                (*v == a && self.t0.is_zero()) || (*v == b && self.t1.is_one())
            }
        }
    }
}

/// Isolated fixed points and pointwise-fixed segments, sorted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FixedSet {
    pub points: Vec<TreePoint>,
    pub segments: Vec<FixedSegment>,
}

impl FixedSet {
    pub fn contains(&self, tree: &Tree, p: &TreePoint) -> bool {
        self.points.contains(p) || self.segments.iter().any(|s| s.contains(tree, p))
    }

    pub fn len(&self) -> usize {
        self.points.len() + self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Exact fixed set: on each piece that sweeps its own edge the fixed-point
/// equation is linear and solved over the rationals.
pub fn fixed_points(f: &TreeMap) -> FixedSet {
    let tree = &f.tree;
    let mut points = BTreeSet::new();
    for (&v, img) in &f.vertex_images {
        if *img == TreePoint::Vertex(v) {
            points.insert(TreePoint::Vertex(v));
        }
    }
    let mut segs: Vec<FixedSegment> = Vec::new();
    for (&e, list) in &f.pieces {
        for pc in list {
            match &pc.image {
                PieceImage::Point(p) => {
                    if let TreePoint::Edge { edge, t } = p {
                        if *edge == e && pc.s0 <= *t && *t <= pc.s1 {
                            points.insert(p.clone());
                        }
                    }
                }
                PieceImage::Linear { edge, u0, u1 } if *edge == e => {
                    let k = (u1 - u0) / (&pc.s1 - &pc.s0);
                    if k.is_one() {
                        if *u0 == pc.s0 {
                            match segs.last_mut() {
                                Some(s) if s.edge == e && s.t1 == pc.s0 => s.t1 = pc.s1.clone(),
                                _ => segs.push(FixedSegment { edge: e, t0: pc.s0.clone(), t1: pc.s1.clone() }),
                            }
                        }
                    } else {
                        let s = (u0 - &k * &pc.s0) / (Q::one() - &k);
                        if pc.s0 <= s && s <= pc.s1 {
                            points.insert(tree.point(e, s).expect("parameter in [0, 1]"));
                        }
                    }
                }
                PieceImage::Linear { .. } => {}
            }
        }
    }
    segs.sort();
    let points = points.into_iter().filter(|p| !segs.iter().any(|s| s.contains(tree, p))).collect();
    FixedSet { points, segments: segs }
}

/// A fixed point strictly inside the arc `(a, b)`, given that `a` separates
/// `f(a)` from `b` and `b` separates `f(b)` from `a`. The point returned is
/// the one nearest to `a`.
pub fn fixed_in_arc(f: &TreeMap, a: &TreePoint, b: &TreePoint) -> Result<TreePoint, DendriteError> {
    let tree = &f.tree;
    let (a, b) = (tree.canon(a)?, tree.canon(b)?);
    let (fa, fb) = (f.eval(&a)?, f.eval(&b)?);
    if !tree.separates(&a, &fa, &b) {
        return Err(DendriteError::HypothesisFailed("a does not separate f(a) from b".into()));
    }
    if !tree.separates(&b, &fb, &a) {
        return Err(DendriteError::HypothesisFailed("b does not separate f(b) from a".into()));
    }
    let fixed = fixed_points(f);
    let mut candidates: Vec<TreePoint> = fixed.points.into_iter().filter(|x| tree.separates(x, &a, &b)).collect();
    for s in &fixed.segments {
        let half = Q::new(1.into(), 2.into());
        for t in [s.t0.clone(), s.t1.clone(), (&s.t0 + &s.t1) * half] {
            let x = tree.point(s.edge, t)?;
            if tree.separates(&x, &a, &b) {
                candidates.push(x);
            }
        }
    }
    candidates
        .into_iter()
        .min_by(|x, y| tree.distance(&a, x).cmp(&tree.distance(&a, y)).then(x.cmp(y)))
        .ok_or_else(|| DendriteError::NoFixedPoint("no fixed point between a and b".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `x` separates the fixed point from the image of `x`.
    Separating { x: TreePoint, image: TreePoint },
    /// The iterate fixes a segment issuing from the point into the component.
    FixedCutpoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakRepelWitness {
    /// Iterate used.
    pub n: usize,
    /// Component of the domain minus the point, named by the edge it starts
    /// along and whether it moves toward parameter 1 on that edge.
    pub edge: usize,
    pub toward_one: bool,
    /// Scale exponent `k` of the first witness: distance `2^-k` of the edge
    /// span available in that direction.
    pub scale: u32,
    pub kind: WitnessKind,
}

/// Looks for a component `B` of the domain minus `p` in which `p` is a weakly
/// repelling fixed point of `f^n`. Probes at scales `2^-k`, `k ≤ 40`; a
/// separating witness is accepted once it persists down to the deepest
/// scale, which for edge-linear maps means it persists all the way to `p`.
/// `None` means nothing was found at this depth.
pub fn weakly_repelling(f: &TreeMap, p: &TreePoint, n: usize) -> Result<Option<WeakRepelWitness>, DendriteError> {
    let g = if n == 1 { f.clone() } else { f.power(n)? };
    let tree = &f.tree;
    let p = tree.canon(p)?;
    if !f.in_domain(&p) {
        return Err(DendriteError::InvalidPoint("outside the domain".into()));
    }
    if g.eval(&p)? != p {
        return Err(DendriteError::NotFixed);
    }
    // (edge, start parameter, span toward the far end)
    let dirs: Vec<(usize, Q, Q)> = match &p {
        TreePoint::Vertex(v) => tree
            .incident(*v)
            .iter()
            .filter(|&&e| f.domain.contains(&tree.other_end(e, *v)))
            .map(|&e| {
                let s = tree.param_of(e, *v);
                let span = if s.is_zero() { Q::one() } else { -Q::one() };
                (e, s, span)
            })
            .collect(),
        TreePoint::Edge { edge, t } => vec![(*edge, t.clone(), -t.clone()), (*edge, t.clone(), Q::one() - t)],
    };
    let fixed = fixed_points(&g);
    for (e, s, span) in dirs {
        let toward_one = span > Q::zero();
        let near = tree.point(e, &s + &span * Q::new(1.into(), (1u64 << 20).into()))?;
        if fixed.segments.iter().any(|seg| seg.contains(tree, &near) && seg.contains(tree, &p)) {
            return Ok(Some(WeakRepelWitness { n, edge: e, toward_one, scale: 1, kind: WitnessKind::FixedCutpoints }));
        }
        let mut first: Option<(u32, TreePoint, TreePoint)> = None;
        for k in 1..=WEAK_REPEL_DEPTH {
            let scale = Q::new(1.into(), num_bigint::BigInt::from(2u8).pow(k));
            let x = tree.point(e, &s + &span * scale)?;
            let fx = g.eval(&x)?;
            if tree.separates(&x, &p, &fx) {
                if first.is_none() {
                    first = Some((k, x, fx));
                }
            } else {
                first = None;
            }
        }
        if let Some((k, x, image)) = first {
            return Ok(Some(WeakRepelWitness {
                n,
                edge: e,
                toward_one,
                scale: k,
                kind: WitnessKind::Separating { x, image },
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicCutpoint {
    pub point: TreePoint,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicReport {
    /// Cutpoints of the domain fixed by some `f^n`, `n ≤ N`, with minimal
    /// periods, sorted by point.
    pub cutpoints: Vec<PeriodicCutpoint>,
    /// Number of fixed points of `f^n` (all valences), for `n = 1..=N`.
    pub fixed_counts: Vec<usize>,
    /// Some iterate fixes a whole segment; those segments are not counted.
    pub non_isolated: bool,
}

/// Periodic cutpoints of a self-map up to period `max_n`.
pub fn periodic_cutpoints(f: &TreeMap, max_n: usize) -> Result<PeriodicReport, DendriteError> {
    if !f.is_self_map() {
        return Err(DendriteError::NotSelfMap);
    }
    let mut iterates = Vec::with_capacity(max_n);
    for _ in 0..max_n {
        let next = match iterates.last() {
            None => f.clone(),
            Some(prev) => TreeMap::then(prev, f)?,
        };
        iterates.push(next);
    }
    let sets: Vec<FixedSet> = iterates.par_iter().map(fixed_points).collect();
    let mut period: BTreeMap<TreePoint, usize> = BTreeMap::new();
    for (i, s) in sets.iter().enumerate() {
        for p in &s.points {
            if f.domain_valence(p) >= 2 {
                period.entry(p.clone()).or_insert(i + 1);
            }
        }
    }
    Ok(PeriodicReport {
        cutpoints: period.into_iter().map(|(point, period)| PeriodicCutpoint { point, period }).collect(),
        fixed_counts: sets.iter().map(|s| s.points.len()).collect(),
        non_isolated: sets.iter().any(|s| !s.segments.is_empty()),
    })
}
