use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{Angle, FiniteLamination, LamClass, LaminationError};
use crate::dendrite::{periodic_cutpoints, weakly_repelling, Tree, TreeMap, TreePoint, WeakRepelWitness, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceKind {
    /// Face touching the circle along these elementary arcs.
    Arcs(Vec<(Angle, Angle)>),
    /// Interior of a gap.
    Gap(LamClass),
}

/// Dual tree of the chord system of a lamination: faces of the disk are
/// vertices and boundary chords of classes are edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quotient {
    pub tree: Tree,
    pub faces: Vec<FaceKind>,
    /// Leaves project to the midpoint of their edge, gaps to their face.
    pub projection: Vec<(LamClass, TreePoint)>,
    /// Tree edge of each chord, keyed by its endpoints.
    #[serde(skip)]
    chord_edge: HashMap<(Angle, Angle), usize>,
    #[serde(skip)]
    arcs: Vec<(Angle, Angle, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn midpoint(u: Angle, v: Angle) -> Angle {
    let len = if u == v { Ratio::from_integer(1) } else { u.arc_to(v) };
    u.rotate(len / Ratio::from_integer(2))
}

fn at_fraction(u: Angle, v: Angle, f: Ratio<i64>) -> Angle {
    let len = if u == v { Ratio::from_integer(1) } else { u.arc_to(v) };
    u.rotate(len * f)
}

impl Quotient {
    /// Face containing the angle `x`, or `None` when `x` is a chord endpoint.
    pub fn face_of_angle(&self, x: Angle) -> Option<usize> {
        self.arcs.iter().find(|&&(u, v, _)| x.in_open_arc(u, v)).map(|&(_, _, f)| f)
    }

    /// Tree point of a class: gap face, chord midpoint, or the face of a
    /// single angle.
    pub fn point_of_class(&self, c: &LamClass) -> Option<TreePoint> {
        match c.len() {
            1 => self.face_of_angle(c.angles()[0]).map(TreePoint::Vertex),
            _ => self.projection.iter().find(|(k, _)| k == c).map(|(_, p)| p.clone()),
        }
    }

    pub fn chord_edge(&self, a: Angle, b: Angle) -> Option<usize> {
        self.chord_edge.get(&(a.min(b), a.max(b))).copied()
    }
}

/// Dual tree of the boundary chords of all classes.
pub fn quotient_tree(l: &FiniteLamination) -> Result<Quotient, LaminationError> {
    let report = l.check_invariance();
    if report.status("E2") == Some(super::CheckStatus::Fail) {
        return Err(LaminationError::InvariantFailed("classes are linked".into()));
    }
    let chords: Vec<(Angle, Angle, usize)> =
        l.classes.iter().enumerate().flat_map(|(i, c)| c.chords().into_iter().map(move |(a, b)| (a, b, i))).collect();
    let mut ends: Vec<Angle> = l.classes.iter().filter(|c| c.len() >= 2).flat_map(|c| c.angles().to_vec()).collect();
    ends.sort();
    if ends.is_empty() {
        let zero = Angle::new(0, 1)?;
        let tree = Tree::with_lengths(vec!["F0".into()], vec![], None, Some(vec![[0.0, 0.0]]))?;
        return Ok(Quotient {
            tree,
            faces: vec![FaceKind::Arcs(vec![(zero, zero)])],
            projection: Vec::new(),
            chord_edge: HashMap::new(),
            arcs: vec![(zero, zero, 0)],
            note: Some("no chords: the quotient is the circle itself, which is not a dendrite".into()),
        });
    }
    let n = ends.len();
    let elementary: Vec<(Angle, Angle)> = (0..n).map(|i| (ends[i], ends[(i + 1) % n])).collect();
    // faces touching the circle: arcs separated by no chord
    let mut sig_face: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut faces: Vec<FaceKind> = Vec::new();
    let mut arc_face = Vec::with_capacity(n);
    for &(u, v) in &elementary {
        let m = midpoint(u, v);
        let sig: Vec<bool> = chords.iter().map(|&(a, b, _)| m.in_open_arc(a, b)).collect();
        let f = *sig_face.entry(sig).or_insert_with(|| {
            faces.push(FaceKind::Arcs(Vec::new()));
            faces.len() - 1
        });
        if let FaceKind::Arcs(list) = &mut faces[f] {
            list.push((u, v));
        }
        arc_face.push(f);
    }
    let num_arc_faces = faces.len();
    let mut gap_face: HashMap<usize, usize> = HashMap::new();
    for (i, c) in l.classes.iter().enumerate() {
        if c.is_gap() {
            gap_face.insert(i, faces.len());
            faces.push(FaceKind::Gap(c.clone()));
        }
    }
    let starting = |a: Angle| arc_face[ends.binary_search(&a).expect("endpoint")];
    let ending = |a: Angle| arc_face[(ends.binary_search(&a).expect("endpoint") + n - 1) % n];
    let mut edges = Vec::new();
    let mut chord_edge = HashMap::new();
    let mut projection = Vec::new();
    for (i, c) in l.classes.iter().enumerate() {
        if c.is_leaf() {
            let (a, b) = (c.angles()[0], c.angles()[1]);
            chord_edge.insert((a, b), edges.len());
            projection.push((c.clone(), TreePoint::Edge { edge: edges.len(), t: Q::new(1.into(), 2.into()) }));
            edges.push((starting(a), ending(a)));
        } else if c.is_gap() {
            let g = gap_face[&i];
            for (s, t) in c.chords() {
                chord_edge.insert((s.min(t), s.max(t)), edges.len());
                edges.push((g, starting(s)));
            }
            projection.push((c.clone(), TreePoint::Vertex(g)));
        }
    }
    let labels: Vec<String> = (0..faces.len())
        .map(|f| if f < num_arc_faces { format!("F{f}") } else { format!("G{}", f - num_arc_faces) })
        .collect();
    let circle = |a: Angle| {
        let t = std::f64::consts::TAU * a.to_f64();
        [t.cos(), t.sin()]
    };
    let coords = faces
        .iter()
        .map(|f| {
            let pts: Vec<[f64; 2]> = match f {
                FaceKind::Arcs(list) => list.iter().map(|&(u, v)| circle(midpoint(u, v))).collect(),
                FaceKind::Gap(c) => c.angles().iter().map(|&a| circle(a)).collect(),
            };
            let k = pts.len() as f64;
            let s = pts.iter().fold([0.0, 0.0], |acc, p| [acc[0] + p[0], acc[1] + p[1]]);
            [0.8 * s[0] / k, 0.8 * s[1] / k]
        })
        .collect();
    let tree = Tree::with_lengths(labels, edges, None, Some(coords))?;
    let arcs = elementary.iter().zip(&arc_face).map(|(&(u, v), &f)| (u, v, f)).collect();
    Ok(Quotient { tree, faces, projection, chord_edge, arcs, note: None })
}

/// The map induced by `sigma_d` on faces, from the dual tree of `deep` to
/// that of `shallow`, followed by the inclusion of the shallow tree into
/// the deep one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologicalPolynomial {
    pub deep: Quotient,
    pub shallow: Quotient,
    /// Image in the shallow tree of each deep face.
    pub face_images: Vec<TreePoint>,
    /// Deep face chosen for each shallow face.
    pub inclusion: Vec<usize>,
    pub map: TreeMap,
}

pub fn topological_polynomial(
    deep: &FiniteLamination,
    shallow: &FiniteLamination,
) -> Result<TopologicalPolynomial, LaminationError> {
    let d = deep.degree;
    if shallow.degree != d {
        return Err(LaminationError::NotCompatible("degrees differ".into()));
    }
    if let Some(c) = shallow.classes.iter().find(|c| !deep.contains_class(c)) {
        return Err(LaminationError::NotCompatible(format!("{c} is not a class of the deeper lamination")));
    }
    for l in [deep, shallow] {
        let rep = l.check_invariance();
        if !rep.ok {
            return Err(LaminationError::InvariantFailed(rep.failed().join(", ")));
        }
    }
    let qd = quotient_tree(deep)?;
    let qs = quotient_tree(shallow)?;

    let mut face_images = Vec::with_capacity(qd.faces.len());
    for (i, f) in qd.faces.iter().enumerate() {
        let img = match f {
            FaceKind::Gap(g) => {
                let h = g.sigma(d);
                qs.point_of_class(&h).ok_or_else(|| {
                    LaminationError::NotCompatible(format!("image of gap {g} is not in the shallow tree"))
                })?
            }
            FaceKind::Arcs(list) => {
                let mut target: Option<usize> = None;
                for &(u, v) in list {
                    for k in 1..4 {
                        let x = at_fraction(u, v, Ratio::new(k, 4)).sigma(d);
                        if let Some(s) = qs.face_of_angle(x) {
                            if target.is_some_and(|t| t != s) {
                                return Err(LaminationError::NotCompatible(format!(
                                    "face {} maps across a shallow chord",
                                    qd.tree.labels[i]
                                )));
                            }
                            target = Some(s);
                        }
                    }
                }
                TreePoint::Vertex(target.ok_or_else(|| {
                    LaminationError::NotCompatible(format!("face {} has no well-defined image", qd.tree.labels[i]))
                })?)
            }
        };
        face_images.push(img);
    }

    // shallow face -> deep face: a deep face inside it bordering the most
    // shallow chords (lowest index on ties); gaps go to the same gap
    let shallow_chord_edges: Vec<usize> =
        shallow.classes.iter().flat_map(|c| c.chords()).filter_map(|(a, b)| qd.chord_edge(a, b)).collect();
    let mut inclusion = Vec::with_capacity(qs.faces.len());
    for (s, f) in qs.faces.iter().enumerate() {
        let chosen = match f {
            FaceKind::Gap(g) => qd
                .faces
                .iter()
                .position(|k| matches!(k, FaceKind::Gap(h) if h == g))
                .expect("shallow gaps are deep gaps"),
            FaceKind::Arcs(_) => {
                let inside = |df: usize| match &qd.faces[df] {
                    FaceKind::Arcs(list) => {
                        let (u, v) = list[0];
                        qs.face_of_angle(midpoint(u, v)) == Some(s)
                    }
                    FaceKind::Gap(_) => false,
                };
                let border = |df: usize| {
                    shallow_chord_edges
                        .iter()
                        .filter(|&&e| qd.tree.edges[e].0 == df || qd.tree.edges[e].1 == df)
                        .count()
                };
                (0..qd.faces.len())
                    .filter(|&df| inside(df))
                    .max_by(|&a, &b| border(a).cmp(&border(b)).then(b.cmp(&a)))
                    .expect("every shallow face contains a deep face")
            }
        };
        inclusion.push(chosen);
    }
    let include = |p: &TreePoint| -> TreePoint {
        match p {
            TreePoint::Vertex(s) => TreePoint::Vertex(inclusion[*s]),
            TreePoint::Edge { edge, t } => {
                let (a, b) = shallow_edge_chord(shallow, &qs, *edge);
                TreePoint::Edge { edge: qd.chord_edge(a, b).expect("shallow chords are deep chords"), t: t.clone() }
            }
        }
    };
    let images = face_images.iter().enumerate().map(|(v, p)| (v, include(p))).collect();
    let map = TreeMap::self_map(qd.tree.clone(), images)?;
    Ok(TopologicalPolynomial { deep: qd, shallow: qs, face_images, inclusion, map })
}

fn shallow_edge_chord(l: &FiniteLamination, q: &Quotient, edge: usize) -> (Angle, Angle) {
    l.classes
        .iter()
        .flat_map(|c| c.chords())
        .find(|&(a, b)| q.chord_edge(a, b) == Some(edge))
        .expect("every edge comes from a chord")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LamWkrpEntry {
    pub point: TreePoint,
    pub label: String,
    pub period: usize,
    pub witness: Option<WeakRepelWitness>,
    /// No witness at the searched iterates and depth; an artifact of the
    /// finite model to be reviewed, not a refutation.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LamWkrpReport {
    pub entries: Vec<LamWkrpEntry>,
    pub non_isolated: bool,
    pub all_witnessed: bool,
}

/// Periodic cutpoints, up to period `max_n`, of the topological polynomial
/// of the last two laminations of `ladder`, each with a weak-repelling
/// witness searched at iterates `period` and `2 * period`.
pub fn lamwkrp_verify(ladder: &[FiniteLamination], max_n: usize) -> Result<LamWkrpReport, LaminationError> {
    for l in ladder {
        let rep = l.check_invariance();
        if !rep.ok {
            return Err(LaminationError::InvariantFailed(rep.failed().join(", ")));
        }
    }
    let (deep, shallow) = match ladder {
        [] => return Err(LaminationError::NotCompatible("empty ladder".into())),
        [only] => (only, only),
        [.., s, d] => (d, s),
    };
    if max_n == 0 {
        return Ok(LamWkrpReport { entries: Vec::new(), non_isolated: false, all_witnessed: true });
    }
    let tp = topological_polynomial(deep, shallow)?;
    let periodic = periodic_cutpoints(&tp.map, max_n)?;
    let mut entries = Vec::with_capacity(periodic.cutpoints.len());
    for c in periodic.cutpoints {
        let mut witness = None;
        for n in [c.period, 2 * c.period] {
            witness = weakly_repelling(&tp.map, &c.point, n)?;
            if witness.is_some() {
                break;
            }
        }
        let label = match &c.point {
            TreePoint::Vertex(v) => tp.deep.tree.labels[*v].clone(),
            TreePoint::Edge { edge, t } => {
                let (a, b) = tp.deep.tree.edges[*edge];
                format!("{}-{}@{}", tp.deep.tree.labels[a], tp.deep.tree.labels[b], t)
            }
        };
        entries.push(LamWkrpEntry { point: c.point, label, period: c.period, flagged: witness.is_none(), witness });
    }
    let all_witnessed = entries.iter().all(|e| !e.flagged);
    Ok(LamWkrpReport { entries, non_isolated: periodic.non_isolated, all_witnessed })
}
