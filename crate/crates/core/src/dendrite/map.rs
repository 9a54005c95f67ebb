use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{qstr, DendriteError, Tree, TreePoint, Q};

/// Image of one domain piece: a single point, or an affine sweep of one edge
/// from parameter `u0` to `u1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceImage {
    Point(TreePoint),
    Linear {
        edge: usize,
        #[serde(with = "qstr")]
        u0: Q,
        #[serde(with = "qstr")]
        u1: Q,
    },
}

/// Restriction of the map to the parameter interval `[s0, s1]` of an edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "qstr")]
    pub s0: Q,
    #[serde(with = "qstr")]
    pub s1: Q,
    pub image: PieceImage,
}

impl Piece {
    fn param_at(&self, s: &Q) -> Option<Q> {
        match &self.image {
            PieceImage::Point(_) => None,
            PieceImage::Linear { u0, u1, .. } => Some(u0 + (u1 - u0) * (s - &self.s0) / (&self.s1 - &self.s0)),
        }
    }

    fn eval(&self, tree: &Tree, s: &Q) -> TreePoint {
        match &self.image {
            PieceImage::Point(p) => p.clone(),
            PieceImage::Linear { edge, .. } => {
                tree.point(*edge, self.param_at(s).expect("linear piece")).expect("parameter within the edge")
            }
        }
    }
}

/// Continuous map from the subtree spanned by `domain` into the subtree
/// spanned by `codomain`, both vertex sets of one ambient tree. Each domain
/// edge carries a sorted list of pieces covering `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap")]
pub struct TreeMap {
    pub tree: Tree,
    pub domain: BTreeSet<usize>,
    pub codomain: BTreeSet<usize>,
    pub vertex_images: BTreeMap<usize, TreePoint>,
    pub pieces: BTreeMap<usize, Vec<Piece>>,
}

#[derive(Deserialize)]
struct RawMap {
    tree: Tree,
    #[serde(default)]
    domain: Option<BTreeSet<usize>>,
    #[serde(default)]
    codomain: Option<BTreeSet<usize>>,
    vertex_images: BTreeMap<usize, TreePoint>,
    #[serde(default)]
    pieces: Option<BTreeMap<usize, Vec<Piece>>>,
}

impl TryFrom<RawMap> for TreeMap {
    type Error = DendriteError;
    fn try_from(r: RawMap) -> Result<Self, DendriteError> {
        let all: BTreeSet<usize> = (0..r.tree.num_vertices()).collect();
        let domain = r.domain.unwrap_or_else(|| all.clone());
        let codomain = r.codomain.unwrap_or(all);
        match r.pieces {
            None => TreeMap::from_vertex_images(r.tree, domain, codomain, r.vertex_images),
            Some(pieces) => {
                let m = TreeMap { tree: r.tree, domain, codomain, vertex_images: r.vertex_images, pieces };
                m.validate()?;
                Ok(m)
            }
        }
    }
}

fn check_subtree(tree: &Tree, set: &BTreeSet<usize>, what: &str) -> Result<(), DendriteError> {
    let bad = || DendriteError::InvalidMap(format!("{what} is not a nonempty connected vertex set"));
    let &start = set.iter().next().ok_or_else(bad)?;
    if set.iter().any(|&v| v >= tree.num_vertices()) {
        return Err(bad());
    }
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &e in tree.incident(v) {
            let w = tree.other_end(e, v);
            if set.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    if seen.len() == set.len() {
        Ok(())
    } else {
        Err(bad())
    }
}

/// Edges with both ends in `set`.
pub(crate) fn edges_within(tree: &Tree, set: &BTreeSet<usize>) -> Vec<usize> {
    (0..tree.edges.len()).filter(|&e| set.contains(&tree.edges[e].0) && set.contains(&tree.edges[e].1)).collect()
}

pub(crate) fn point_in(tree: &Tree, set: &BTreeSet<usize>, p: &TreePoint) -> bool {
    match p {
        TreePoint::Vertex(v) => set.contains(v),
        TreePoint::Edge { edge, .. } => {
            let (a, b) = tree.edges[*edge];
            set.contains(&a) && set.contains(&b)
        }
    }
}

/// Joins neighbouring pieces that continue one another.
fn merge(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            let joinable = match (&last.image, &p.image) {
                (PieceImage::Point(a), PieceImage::Point(b)) => a == b,
                (PieceImage::Linear { edge: e1, u0: a0, u1: a1 }, PieceImage::Linear { edge: e2, u0: b0, u1: b1 }) => {
                    e1 == e2 && a1 == b0 && (a1 - a0) / (&last.s1 - &last.s0) == (b1 - b0) / (&p.s1 - &p.s0)
                }
                _ => false,
            };
            if joinable {
                last.s1 = p.s1;
                if let (PieceImage::Linear { u1, .. }, PieceImage::Linear { u1: nu1, .. }) = (&mut last.image, p.image)
                {
                    *u1 = nu1;
                }
                continue;
            }
        }
        out.push(p);
    }
    out
}

impl TreeMap {
    /// Markov map: each domain edge is stretched linearly in arc length over
    /// the arc joining the images of its endpoints.
    pub fn from_vertex_images(
        tree: Tree,
        domain: BTreeSet<usize>,
        codomain: BTreeSet<usize>,
        images: BTreeMap<usize, TreePoint>,
    ) -> Result<Self, DendriteError> {
        check_subtree(&tree, &domain, "domain")?;
        check_subtree(&tree, &codomain, "codomain")?;
        let mut vertex_images = BTreeMap::new();
        for &v in &domain {
            let p = images.get(&v).ok_or_else(|| DendriteError::InvalidMap(format!("no image for vertex {v}")))?;
            let p = tree.canon(p)?;
            if !point_in(&tree, &codomain, &p) {
                return Err(DendriteError::InvalidMap(format!("image of vertex {v} leaves the codomain")));
            }
            vertex_images.insert(v, p);
        }
        let mut pieces = BTreeMap::new();
        for e in edges_within(&tree, &domain) {
            let (a, b) = tree.edges[e];
            let (fa, fb) = (&vertex_images[&a], &vertex_images[&b]);
            let legs = tree.path_legs(fa, fb);
            let total = legs.iter().map(|l| tree.leg_length(l)).fold(Q::zero(), |x, y| x + y);
            let list = if total.is_zero() {
                vec![Piece { s0: Q::zero(), s1: Q::one(), image: PieceImage::Point(fa.clone()) }]
            } else {
                let mut acc = Q::zero();
                legs.into_iter()
                    .map(|l| {
                        let s0 = &acc / &total;
                        acc += tree.leg_length(&l);
                        Piece {
                            s0,
                            s1: &acc / &total,
                            image: PieceImage::Linear { edge: l.edge, u0: l.from, u1: l.to },
                        }
                    })
                    .collect()
            };
            pieces.insert(e, list);
        }
        Ok(TreeMap { tree, domain, codomain, vertex_images, pieces })
    }

    /// Self-map of the whole tree given by vertex images.
    pub fn self_map(tree: Tree, images: BTreeMap<usize, TreePoint>) -> Result<Self, DendriteError> {
        let all: BTreeSet<usize> = (0..tree.num_vertices()).collect();
        TreeMap::from_vertex_images(tree, all.clone(), all, images)
    }

    fn validate(&self) -> Result<(), DendriteError> {
        check_subtree(&self.tree, &self.domain, "domain")?;
        check_subtree(&self.tree, &self.codomain, "codomain")?;
        let bad = |m: String| DendriteError::InvalidMap(m);
        for e in edges_within(&self.tree, &self.domain) {
            let list = self.pieces.get(&e).ok_or_else(|| bad(format!("edge {e} has no pieces")))?;
            let mut s = Q::zero();
            for p in list {
                if p.s0 != s || p.s1 <= p.s0 {
                    return Err(bad(format!("pieces of edge {e} do not tile [0, 1]")));
                }
                s = p.s1.clone();
            }
            if !s.is_one() {
                return Err(bad(format!("pieces of edge {e} do not tile [0, 1]")));
            }
        }
        for &v in &self.domain {
            if !self.vertex_images.contains_key(&v) {
                return Err(bad(format!("no image for vertex {v}")));
            }
        }
        Ok(())
    }

    pub fn is_self_map(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn domain_edges(&self) -> Vec<usize> {
        edges_within(&self.tree, &self.domain)
    }

    pub fn in_domain(&self, p: &TreePoint) -> bool {
        point_in(&self.tree, &self.domain, p)
    }

    /// Number of components of the domain minus `p`.
    pub fn domain_valence(&self, p: &TreePoint) -> usize {
        match p {
            TreePoint::Vertex(v) => {
                self.tree.incident(*v).iter().filter(|&&e| self.domain.contains(&self.tree.other_end(e, *v))).count()
            }
            TreePoint::Edge { .. } => 2,
        }
    }

    pub fn eval(&self, p: &TreePoint) -> Result<TreePoint, DendriteError> {
        let p = self.tree.canon(p)?;
        if !self.in_domain(&p) {
            return Err(DendriteError::InvalidPoint("outside the domain".into()));
        }
        Ok(match &p {
            TreePoint::Vertex(v) => self.vertex_images[v].clone(),
            TreePoint::Edge { edge, t } => {
                let piece = self.pieces[edge].iter().find(|pc| pc.s0 <= *t && *t <= pc.s1).expect("pieces tile [0, 1]");
                piece.eval(&self.tree, t)
            }
        })
    }

    /// `g ∘ f` for `self = f`. Needs the codomain of `f` inside the domain of `g`.
    pub fn then(&self, g: &TreeMap) -> Result<TreeMap, DendriteError> {
        if self.tree != g.tree || !self.codomain.is_subset(&g.domain) {
            return Err(DendriteError::InvalidMap("maps cannot be composed".into()));
        }
        let mut pieces = BTreeMap::new();
        for (&e, list) in &self.pieces {
            let mut out = Vec::new();
            for pc in list {
                match &pc.image {
                    PieceImage::Point(p) => {
                        out.push(Piece { s0: pc.s0.clone(), s1: pc.s1.clone(), image: PieceImage::Point(g.eval(p)?) })
                    }
                    PieceImage::Linear { edge, u0, u1 } => {
                        let (lo, hi) = if u0 < u1 { (u0, u1) } else { (u1, u0) };
                        let s_of = |u: &Q| &pc.s0 + (u - u0) / (u1 - u0) * (&pc.s1 - &pc.s0);
                        for gp in &g.pieces[edge] {
                            let a = if gp.s0 > *lo { &gp.s0 } else { lo };
                            let b = if gp.s1 < *hi { &gp.s1 } else { hi };
                            if a >= b {
                                continue;
                            }
                            let (sa, sb) = (s_of(a), s_of(b));
                            let (s0, s1, ua, ub) = if sa < sb { (sa, sb, a, b) } else { (sb, sa, b, a) };
                            let image = match &gp.image {
                                PieceImage::Point(q) => PieceImage::Point(q.clone()),
                                PieceImage::Linear { edge: ge, .. } => PieceImage::Linear {
                                    edge: *ge,
                                    u0: gp.param_at(ua).expect("linear"),
                                    u1: gp.param_at(ub).expect("linear"),
                                },
                            };
                            out.push(Piece { s0, s1, image });
                        }
                    }
                }
            }
            out.sort_by(|x, y| x.s0.cmp(&y.s0));
            pieces.insert(e, merge(out));
        }
        let vertex_images =
            self.vertex_images.iter().map(|(&v, p)| Ok((v, g.eval(p)?))).collect::<Result<_, DendriteError>>()?;
        Ok(TreeMap {
            tree: self.tree.clone(),
            domain: self.domain.clone(),
            codomain: g.codomain.clone(),
            vertex_images,
            pieces,
        })
    }

    /// The `n`-th iterate of a self-map, `n ≥ 1`.
    pub fn power(&self, n: usize) -> Result<TreeMap, DendriteError> {
        if !self.is_self_map() {
            return Err(DendriteError::NotSelfMap);
        }
        assert!(n >= 1, "iterate index starts at 1");
        let mut g = self.clone();
        for _ in 1..n {
            g = g.then(self)?;
        }
        Ok(g)
    }

    /// Replaces every piece image by `h` applied to it, where `h` must send
    /// each codomain edge either onto itself identically or to one point.
    pub(crate) fn map_images(&self, codomain: BTreeSet<usize>, h: impl Fn(&PieceImage) -> PieceImage) -> TreeMap {
        let pieces = self
            .pieces
            .iter()
            .map(|(&e, list)| {
                let out = list.iter().map(|pc| Piece { s0: pc.s0.clone(), s1: pc.s1.clone(), image: h(&pc.image) });
                (e, merge(out.collect()))
            })
            .collect();
        TreeMap {
            tree: self.tree.clone(),
            domain: self.domain.clone(),
            codomain,
            vertex_images: self.vertex_images.clone(),
            pieces,
        }
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.values().map(Vec::len).sum()
    }
}

/// Full tent map on `[0, 1]` with vertices at `0`, `1/2`, `1`: the left
/// half doubles onto `[0, 1]` and the right half folds back.
pub fn full_tent() -> TreeMap {
    let half = Q::new(1.into(), 2.into());
    let tree = Tree::with_lengths(
        vec!["0".into(), "1/2".into(), "1".into()],
        vec![(0, 1), (1, 2)],
        Some(vec![half.clone(), half]),
        Some(vec![[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]]),
    )
    .expect("path graph");
    let images = BTreeMap::from([(0, TreePoint::Vertex(0)), (1, TreePoint::Vertex(2)), (2, TreePoint::Vertex(0))]);
    TreeMap::self_map(tree, images).expect("tent map is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    /// Point of the tent tree at position `x ∈ [0, 1]`.
    fn at(x: Q) -> TreePoint {
        let t = full_tent();
        if x <= q(1, 2) {
            t.tree.point(0, x * q(2, 1)).unwrap()
        } else {
            t.tree.point(1, (x - q(1, 2)) * q(2, 1)).unwrap()
        }
    }

    #[test]
    fn tent_values() {
        let f = full_tent();
        assert_eq!(f.eval(&at(q(2, 5))).unwrap(), at(q(4, 5)));
        assert_eq!(f.eval(&at(q(4, 5))).unwrap(), at(q(2, 5)));
        assert_eq!(f.eval(&at(q(1, 3))).unwrap(), at(q(2, 3)));
        assert_eq!(f.num_pieces(), 4);
    }

    #[test]
    fn iterates_compose_pointwise() {
        let f = full_tent();
        let f3 = f.power(3).unwrap();
        assert_eq!(f3.num_pieces(), 16);
        for k in 0..=40 {
            let x = at(q(k, 40));
            let direct = f.eval(&f.eval(&f.eval(&x).unwrap()).unwrap()).unwrap();
            assert_eq!(f3.eval(&x).unwrap(), direct);
        }
    }

    #[test]
    fn json_round_trip() {
        let f = full_tent().power(2).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: TreeMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
