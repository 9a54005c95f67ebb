use std::collections::VecDeque;
use std::f64::consts::TAU;

use clap::Args;
use num_traits::ToPrimitive;
use planefix::dendrite::{
    fixed_points, full_tent, periodic_cutpoints, scrambles_boundary, weakly_repelling, Tree, TreeMap, TreePoint,
};
use planefix::geometry::{PlaneCurve, Point};
use planefix::lamination::{pullback_with_report, quotient_tree, FiniteLamination, LamClass};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Outcome, Status};
use crate::error::CliError;
use crate::input::read_json;
use crate::svg::{Figure, Style};
use crate::Common;

/// Vertex positions: the stored coordinates, or a layered layout by
/// breadth-first depth from vertex 0.
fn layout(t: &Tree) -> Vec<Point> {
    if let Some(c) = &t.coords {
        return c.iter().map(|&[x, y]| Point::new(x, y)).collect();
    }
    let n = t.labels.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &t.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut depth = vec![usize::MAX; n];
    let mut q = VecDeque::new();
    let mut rows: Vec<usize> = Vec::new();
    let mut pos = vec![Point::ORIGIN; n];
    if n > 0 {
        depth[0] = 0;
        q.push_back(0);
    }
    while let Some(v) = q.pop_front() {
        let d = depth[v];
        if rows.len() <= d {
            rows.push(0);
        }
        pos[v] = Point::new(d as f64, -(rows[d] as f64));
        rows[d] += 1;
        for &w in &adj[v] {
            if depth[w] == usize::MAX {
                depth[w] = d + 1;
                q.push_back(w);
            }
        }
    }
    pos
}

fn locate(t: &Tree, pos: &[Point], p: &TreePoint) -> Point {
    match p {
        TreePoint::Vertex(v) => pos[*v],
        TreePoint::Edge { edge, t: s } => {
            let (a, b) = t.edges[*edge];
            pos[a].lerp(pos[b], s.to_f64().unwrap_or(0.5))
        }
    }
}

pub fn draw_tree(fig: &mut Figure, t: &Tree) -> Vec<Point> {
    let pos = layout(t);
    for &(a, b) in &t.edges {
        fig.path(&[pos[a], pos[b]], false, Style::Edge);
    }
    for (v, l) in t.labels.iter().enumerate() {
        fig.marker(pos[v], "#333333", Some(l.clone()));
    }
    pos
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DendriteArgs {
    /// Tree map JSON file (tree, vertex_images, optional domain and codomain).
    #[arg(long, required_unless_present = "preset")]
    pub map: Option<String>,
    /// Built-in map; `tent` is the full tent map on [0, 1].
    #[arg(long)]
    pub preset: Option<String>,
    /// Largest period examined for periodic cutpoints.
    #[arg(long, default_value_t = 3)]
    pub periods: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn dendrite(a: &DendriteArgs) -> Result<Outcome, CliError> {
    let f: TreeMap = match (&a.preset, &a.map) {
        (Some(p), _) if p == "tent" => full_tent(),
        (Some(p), _) => return Err(CliError::input(format!("unknown preset '{p}'"))),
        (None, Some(path)) => read_json(path)?,
        (None, None) => return Err(CliError::input("need --map or --preset")),
    };
    if a.periods == 0 {
        return Err(CliError::input("--periods must be positive"));
    }
    let mut fig = Figure::new("tree map");
    let pos = draw_tree(&mut fig, &f.tree);

    if !f.is_self_map() {
        let scrambles = scrambles_boundary(&f)?;
        let r = f.retracted();
        let fixed = fixed_points(&r);
        let found: Vec<TreePoint> =
            fixed.points.iter().filter(|p| f.eval(p).map(|q| &q == *p).unwrap_or(false)).cloned().collect();
        for p in &found {
            fig.marker(locate(&f.tree, &pos, p), "#d62728", None);
        }
        let status = Status::from_bool(!scrambles || !found.is_empty());
        let result = json!({ "self_map": false, "scrambles_boundary": scrambles, "retract_fixed": fixed, "fixed_points": found });
        return Outcome::new(&result, status, fig);
    }

    let fixed = fixed_points(&f);
    let per = periodic_cutpoints(&f, a.periods)?;
    let mut witnesses = Vec::new();
    let mut all = true;
    for c in &per.cutpoints {
        let mut w = None;
        for n in [c.period, 2 * c.period] {
            if let Some(x) = weakly_repelling(&f, &c.point, n)? {
                w = Some(x);
                break;
            }
        }
        all &= w.is_some();
        fig.marker(
            locate(&f.tree, &pos, &c.point),
            if w.is_some() { "#d62728" } else { "#7f7f7f" },
            Some(format!("p{}", c.period)),
        );
        witnesses.push(json!({ "point": c.point, "period": c.period, "witness": w }));
    }
    let result = json!({
        "self_map": true,
        "fixed_points": fixed,
        "periodic": per,
        "witnesses": witnesses,
        "all_witnessed": all,
    });
    Outcome::new(&result, Status::from_bool(all), fig)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct LaminationArgs {
    /// Seed class, e.g. `1/3,2/3`.
    #[arg(long, conflicts_with = "file")]
    pub seed: Option<String>,
    /// Lamination JSON file (`degree`, `classes`).
    #[arg(long)]
    pub file: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Pullback depth for `--seed`.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[command(flatten)]
    pub common: Common,
}

fn circle_point(a: planefix::lamination::Angle) -> Point {
    Point::polar(1.0, TAU * a.to_f64())
}

pub fn lamination(a: &LaminationArgs) -> Result<Outcome, CliError> {
    let (lam, ambiguities) = match (&a.seed, &a.file) {
        (Some(s), _) => {
            let seed: LamClass = LamClass::new(s.split(',').map(|t| t.trim().parse()).collect::<Result<Vec<_>, _>>()?)?;
            let rep = pullback_with_report(&seed, a.degree, a.depth)?;
            (rep.lamination, rep.ambiguities)
        }
        (None, Some(path)) => {
            let l: FiniteLamination = read_json(path)?;
            (FiniteLamination::new(l.degree, l.classes)?, Vec::new())
        }
        (None, None) => (FiniteLamination::new(a.degree, Vec::new())?, Vec::new()),
    };
    let inv = lam.check_invariance();
    let q = quotient_tree(&lam)?;

    let mut fig = Figure::new("lamination");
    fig.path(&PlaneCurve::circle(Point::ORIGIN, 1.0, 256).vertices, true, Style::Curve);
    for c in &lam.classes {
        let pts: Vec<Point> = c.angles().iter().map(|&x| circle_point(x)).collect();
        if c.is_gap() {
            fig.path(&pts, true, Style::Gap);
        } else {
            fig.path(&pts, false, Style::Chord);
        }
    }
    let chords: usize = lam.classes.iter().map(|c| c.chords().len()).sum();
    let result = json!({
        "lamination": lam,
        "chords": chords,
        "ambiguities": ambiguities,
        "invariance": inv,
        "quotient": q,
    });
    Outcome::new(&result, Status::from_bool(inv.ok), fig)
}
