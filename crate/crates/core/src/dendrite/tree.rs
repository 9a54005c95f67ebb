use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{DendriteError, Q};

/// Finite tree with rational edge lengths. Edge `i` runs from `edges[i].0`
/// (parameter 0) to `edges[i].1` (parameter 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct Tree {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub lengths: Vec<Q>,
    pub coords: Option<Vec<[f64; 2]>>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawTree {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lengths: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
}

impl TryFrom<RawTree> for Tree {
    type Error = DendriteError;
    fn try_from(r: RawTree) -> Result<Self, Self::Error> {
        let idx = |l: &str| {
            r.vertices
                .iter()
                .position(|v| v == l)
                .ok_or_else(|| DendriteError::InvalidTree(format!("unknown vertex {l}")))
        };
        let edges = r.edges.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect::<Result<Vec<_>, DendriteError>>()?;
        let lengths = match r.lengths {
            None => None,
            Some(ls) => Some(
                ls.iter()
                    .map(|s| s.parse::<Q>().map_err(|_| DendriteError::InvalidTree(format!("bad length {s}"))))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Tree::with_lengths(r.vertices, edges, lengths, r.coords)
    }
}

impl From<Tree> for RawTree {
    fn from(t: Tree) -> Self {
        let all_unit = t.lengths.iter().all(|l| l.is_one());
        RawTree {
            edges: t.edges.iter().map(|&(a, b)| (t.labels[a].clone(), t.labels[b].clone())).collect(),
            lengths: (!all_unit).then(|| t.lengths.iter().map(|l| l.to_string()).collect()),
            vertices: t.labels,
            coords: t.coords,
        }
    }
}

/// A point of a tree: a vertex, or an interior point of an edge at a
/// parameter strictly between 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TreePoint {
    Vertex(usize),
    Edge { edge: usize, t: Q },
}

/// One leg of a tree path: edge `edge` traversed from parameter `from` to `to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub edge: usize,
    pub from: Q,
    pub to: Q,
}

impl Tree {
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self, DendriteError> {
        Tree::with_lengths(labels, edges, None, None)
    }

    pub fn with_lengths(
        labels: Vec<String>,
        edges: Vec<(usize, usize)>,
        lengths: Option<Vec<Q>>,
        coords: Option<Vec<[f64; 2]>>,
    ) -> Result<Self, DendriteError> {
        let n = labels.len();
        if n == 0 {
            return Err(DendriteError::InvalidTree("no vertices".into()));
        }
        if edges.len() + 1 != n {
            return Err(DendriteError::InvalidTree(format!("{n} vertices need {} edges, got {}", n - 1, edges.len())));
        }
        let lengths = lengths.unwrap_or_else(|| vec![Q::one(); edges.len()]);
        if lengths.len() != edges.len() || lengths.iter().any(|l| *l <= Q::zero()) {
            return Err(DendriteError::InvalidTree("edge lengths must be positive, one per edge".into()));
        }
        if coords.as_ref().is_some_and(|c| c.len() != n) {
            return Err(DendriteError::InvalidTree("one coordinate pair per vertex".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n || a == b {
                return Err(DendriteError::InvalidTree(format!("bad edge {i}")));
            }
            adj[a].push(i);
            adj[b].push(i);
        }
        let t = Tree { labels, edges, lengths, coords, adj };
        if t.bfs_parents(0).iter().any(|p| p.is_none()) {
            return Err(DendriteError::InvalidTree("not connected".into()));
        }
        Ok(t)
    }

    /// Path graph `v0 - v1 - ... - vn` with the given edge lengths.
    pub fn path(lengths: Vec<Q>) -> Self {
        let n = lengths.len() + 1;
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
        Tree::with_lengths(labels, edges, Some(lengths), None).expect("path graph is a tree")
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Parameter of vertex `v` on edge `e` (0 or 1).
    pub fn param_of(&self, e: usize, v: usize) -> Q {
        if self.edges[e].0 == v {
            Q::zero()
        } else {
            Q::one()
        }
    }

    /// Point of edge `e` at parameter `t`, in canonical form.
    pub fn point(&self, e: usize, t: Q) -> Result<TreePoint, DendriteError> {
        if e >= self.edges.len() || t < Q::zero() || t > Q::one() {
            return Err(DendriteError::InvalidPoint(format!("edge {e} at {t}")));
        }
        Ok(if t.is_zero() {
            TreePoint::Vertex(self.edges[e].0)
        } else if t.is_one() {
            TreePoint::Vertex(self.edges[e].1)
        } else {
            TreePoint::Edge { edge: e, t }
        })
    }

    pub fn canon(&self, p: &TreePoint) -> Result<TreePoint, DendriteError> {
        match p {
            TreePoint::Vertex(v) if *v < self.num_vertices() => Ok(p.clone()),
            TreePoint::Vertex(v) => Err(DendriteError::InvalidPoint(format!("vertex {v}"))),
            TreePoint::Edge { edge, t } => self.point(*edge, t.clone()),
        }
    }

    /// Number of components of the tree minus `p`.
    pub fn valence(&self, p: &TreePoint) -> usize {
        match p {
            TreePoint::Vertex(v) => self.adj[*v].len(),
            TreePoint::Edge { .. } => 2,
        }
    }

    fn bfs_parents(&self, root: usize) -> Vec<Option<(usize, usize)>> {
        // parent vertex and connecting edge; the root points to itself
        let mut par = vec![None; self.num_vertices()];
        par[root] = Some((root, usize::MAX));
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for &e in &self.adj[v] {
                let w = self.other_end(e, v);
                if par[w].is_none() {
                    par[w] = Some((v, e));
                    q.push_back(w);
                }
            }
        }
        par
    }

    /// Edges of the vertex path from `a` to `b`, in order.
    pub fn vertex_path(&self, a: usize, b: usize) -> Vec<usize> {
        let par = self.bfs_parents(b);
        let mut out = Vec::new();
        let mut v = a;
        while v != b {
            let (w, e) = par[v].expect("tree is connected");
            out.push(e);
            v = w;
        }
        out
    }

    /// Ends through which `p` can be left, with the edge it must not re-enter.
    fn anchors(&self, p: &TreePoint) -> Vec<(usize, Option<usize>, Q)> {
        match p {
            TreePoint::Vertex(v) => vec![(*v, None, Q::zero())],
            TreePoint::Edge { edge, t } => {
                let (a, b) = self.edges[*edge];
                vec![(a, Some(*edge), t.clone()), (b, Some(*edge), Q::one() - t)]
            }
        }
    }

    /// The arc from `p` to `q` as a list of edge legs (empty when `p == q`).
    pub fn path_legs(&self, p: &TreePoint, q: &TreePoint) -> Vec<Leg> {
        if p == q {
            return Vec::new();
        }
        if let (TreePoint::Edge { edge: e1, t: t1 }, TreePoint::Edge { edge: e2, t: t2 }) = (p, q) {
            if e1 == e2 {
                return vec![Leg { edge: *e1, from: t1.clone(), to: t2.clone() }];
            }
        }
        if let (TreePoint::Edge { edge, t }, TreePoint::Vertex(v))
        | (TreePoint::Vertex(v), TreePoint::Edge { edge, t }) = (p, q)
        {
            let (a, b) = self.edges[*edge];
            if a == *v || b == *v {
                let tv = self.param_of(*edge, *v);
                let leg = if matches!(p, TreePoint::Vertex(_)) {
                    Leg { edge: *edge, from: tv, to: t.clone() }
                } else {
                    Leg { edge: *edge, from: t.clone(), to: tv }
                };
                return vec![leg];
            }
        }
        for (va, ea, _) in self.anchors(p) {
            for (vb, eb, _) in self.anchors(q) {
                let mid = self.vertex_path(va, vb);
                if ea.is_some_and(|e| mid.contains(&e)) || eb.is_some_and(|e| mid.contains(&e)) {
                    continue;
                }
                let mut legs = Vec::new();
                if let (Some(e), TreePoint::Edge { t, .. }) = (ea, p) {
                    legs.push(Leg { edge: e, from: t.clone(), to: self.param_of(e, va) });
                }
                let mut v = va;
                for e in mid {
                    let w = self.other_end(e, v);
                    legs.push(Leg { edge: e, from: self.param_of(e, v), to: self.param_of(e, w) });
                    v = w;
                }
                if let (Some(e), TreePoint::Edge { t, .. }) = (eb, q) {
                    legs.push(Leg { edge: e, from: self.param_of(e, vb), to: t.clone() });
                }
                return legs;
            }
        }
        unreachable!("some anchor pair gives the tree path")
    }

    pub fn leg_length(&self, l: &Leg) -> Q {
        (&l.to - &l.from).abs() * &self.lengths[l.edge]
    }

    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> Q {
        self.path_legs(p, q).iter().map(|l| self.leg_length(l)).fold(Q::zero(), |a, b| a + b)
    }

    /// Whether `x` lies on the arc `[p, q]`.
    pub fn on_arc(&self, x: &TreePoint, p: &TreePoint, q: &TreePoint) -> bool {
        self.distance(p, x) + self.distance(x, q) == self.distance(p, q)
    }

    /// Whether `x` separates `p` from `q`: `x` lies on `[p, q]` and differs
    /// from both ends.
    pub fn separates(&self, x: &TreePoint, p: &TreePoint, q: &TreePoint) -> bool {
        x != p && x != q && self.on_arc(x, p, q)
    }

    /// Edge of `T \ {p}` by which the arc from `p` to `q` leaves `p`, with the
    /// parameter direction (`true` when it moves toward parameter 1).
    pub fn direction(&self, p: &TreePoint, q: &TreePoint) -> Option<(usize, bool)> {
        let legs = self.path_legs(p, q);
        let l = legs.first()?;
        Some((l.edge, l.to > l.from))
    }

    /// Splits edge `e` at `t`, returning the new tree and the new vertex. The
    /// halves keep the metric: the old edge index becomes the half at the
    /// start and a new last edge holds the rest.
    pub fn subdivide(&self, e: usize, t: &Q, label: &str) -> Result<(Tree, usize), DendriteError> {
        if *t <= Q::zero() || *t >= Q::one() || e >= self.edges.len() {
            return Err(DendriteError::InvalidPoint(format!("edge {e} at {t}")));
        }
        let (a, b) = self.edges[e];
        let m = self.num_vertices();
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        let mut edges = self.edges.clone();
        edges[e] = (a, m);
        edges.push((m, b));
        let mut lengths = self.lengths.clone();
        let len = lengths[e].clone();
        lengths[e] = &len * t;
        lengths.push(&len * (Q::one() - t));
        let coords = self.coords.as_ref().map(|c| {
            let mut c = c.clone();
            let s: f64 = num_traits::ToPrimitive::to_f64(t).unwrap_or(0.5);
            c.push([c[a][0] + s * (c[b][0] - c[a][0]), c[a][1] + s * (c[b][1] - c[a][1])]);
            c
        });
        Ok((Tree::with_lengths(labels, edges, Some(lengths), coords)?, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    pub(crate) fn y_tree() -> Tree {
        // center c = 0, leaves a = 1, b = 2, d = 3
        Tree::new(vec!["c".into(), "a".into(), "b".into(), "d".into()], vec![(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn valences() {
        let t = y_tree();
        assert_eq!(t.valence(&TreePoint::Vertex(0)), 3);
        assert_eq!(t.valence(&TreePoint::Vertex(1)), 1);
        assert_eq!(t.valence(&t.point(0, q(1, 2)).unwrap()), 2);
    }

    #[test]
    fn paths_and_separation() {
        let t = y_tree();
        let x = t.point(0, q(1, 2)).unwrap();
        let y = t.point(1, q(1, 4)).unwrap();
        assert_eq!(t.distance(&x, &y), q(3, 4));
        assert!(t.separates(&TreePoint::Vertex(0), &x, &y));
        assert!(!t.separates(&TreePoint::Vertex(3), &x, &y));
        assert_eq!(t.direction(&TreePoint::Vertex(0), &y), Some((1, true)));
    }

    #[test]
    fn rejects_cycles() {
        assert!(Tree::new(vec!["a".into(), "b".into(), "c".into()], vec![(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let t = Tree::path(vec![q(1, 2), Q::one()]);
        let s = serde_json::to_string(&t).unwrap();
        let back: Tree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
