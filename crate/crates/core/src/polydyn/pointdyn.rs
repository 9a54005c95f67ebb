use serde::{Deserialize, Serialize};

use super::fixed::{classify_fixed, fixed_rays_at};
use super::puzzle::{puzzle_piece_check, ExitSpec, PuzzleOptions, PuzzlePiece};
use super::ray::connectedness_warning;
use super::PolyDynError;
use crate::geometry::{Point, Raster, Region};
use crate::map_analysis::{FixedKind, FixedPointRecord};
use crate::poly::Poly;
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum PointdynCase {
    /// `X` is an invariant continuum in the Julia set.
    Invariant,
    /// `X` is a general puzzle piece with the given exits.
    Puzzle { exits: Vec<ExitSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointdynInstance {
    pub x: Region,
    #[serde(flatten)]
    pub case: PointdynCase,
    /// Largest ray denominator searched at each fixed point.
    #[serde(default = "default_qmax")]
    pub qmax: i64,
}

fn default_qmax() -> i64 {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisState {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub state: HypothesisState,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PointdynVerdict {
    NotApplicable {
        reason: String,
    },
    HypothesisViolated {
        names: Vec<String>,
    },
    /// Some hypothesis could not be decided either way.
    Inconclusive {
        names: Vec<String>,
    },
    /// All hypotheses hold and `X` is below the resolution.
    Consistent,
    /// All hypotheses hold but `X` is visibly not a point.
    ContradictionAlarm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointdynReport {
    pub fixed_points: Vec<FixedPointRecord>,
    pub hypotheses: Vec<Hypothesis>,
    pub x_diameter: f64,
    pub resolution: f64,
    pub verdict: PointdynVerdict,
    pub warning: Option<String>,
}

fn hyp(name: &str, state: HypothesisState, detail: impl Into<String>) -> Hypothesis {
    Hypothesis { name: name.into(), state, detail: detail.into() }
}

const H_INVARIANT: &str = "X is invariant";
const H_PUZZLE: &str = "X is a general puzzle-piece";
const H_EXITS: &str = "each exit maps into its wedge or is a fixed point";
const H_PARABOLIC_DOMAIN: &str = "X contains no invariant parabolic domain";
pub const H_KINDS: &str = "all fixed points in X are repelling or parabolic";
pub const H_RAYS: &str = "all rays landing at them are fixed";

/// Distinct fixed points of `p`, refined and classified.
fn fixed_points(p: &Poly, tol: &Tolerances) -> Vec<FixedPointRecord> {
    let mut out: Vec<FixedPointRecord> = Vec::new();
    for r in p.displacement().roots() {
        if let Ok(rec) = classify_fixed(p, Point::from_complex(r), tol) {
            if !out.iter().any(|o| o.location.dist(rec.location) < 1e-6) {
                out.push(rec);
            }
        }
    }
    out.sort_by(|a, b| a.location.x.total_cmp(&b.location.x).then(a.location.y.total_cmp(&b.location.y)));
    out
}

fn fmt_pt(p: Point) -> String {
    format!("({:.6}, {:.6})", p.x, p.y)
}

/// Check the hypotheses of the point-degeneracy statement for `instance`:
/// if they all hold, `X` must be a repelling or parabolic fixed point.
pub fn pointdyn_harness(
    p: &Poly,
    instance: &PointdynInstance,
    opts: &PuzzleOptions,
    tol: &Tolerances,
) -> Result<PointdynReport, PolyDynError> {
    let x = &instance.x;
    x.validate()?;
    let warning = connectedness_warning(p);
    let x_diameter = x.diameter();
    let h = x_diameter.max(1.0) / opts.grid.max(8) as f64;
    let eps = (2.0 * h).max(1e-6);
    let resolution = opts.rays.land.max(2.0 * h);
    let all_fixed = fixed_points(p, tol);
    let in_x: Vec<FixedPointRecord> = all_fixed.iter().filter(|r| x.contains(r.location, eps)).cloned().collect();
    let done = |hypotheses, verdict| PointdynReport {
        fixed_points: in_x.clone(),
        hypotheses,
        x_diameter,
        resolution,
        verdict,
        warning: warning.clone(),
    };
    if !x.is_non_separating(opts.grid) {
        let v = PointdynVerdict::NotApplicable { reason: "X is separating".into() };
        return Ok(done(Vec::new(), v));
    }

    let mut hs = Vec::new();
    match &instance.case {
        PointdynCase::Invariant => {
            let bad = x.sample(h.max(x_diameter / 256.0)).into_iter().find(|&q| {
                let y = p.eval(q.to_complex());
                !x.contains(Point::from_complex(y), eps)
            });
            hs.push(match bad {
                None => hyp(H_INVARIANT, HypothesisState::Holds, "sampled images stay in X"),
                Some(q) => hyp(H_INVARIANT, HypothesisState::Fails, format!("P{} leaves X", fmt_pt(q))),
            });
        }
        PointdynCase::Puzzle { exits } => {
            let piece = PuzzlePiece { x: x.clone(), exits: exits.clone() };
            match puzzle_piece_check(p, &piece, opts) {
                Ok(rep) => {
                    hs.push(hyp(H_PUZZLE, HypothesisState::Holds, "conditions (1)-(3) verified on the raster"));
                    hs.push(exit_mapping(p, exits, &rep.wedges, eps));
                }
                Err(PolyDynError::ConditionFailed(k, msg)) => {
                    hs.push(hyp(H_PUZZLE, HypothesisState::Fails, format!("condition ({k}): {msg}")));
                }
                Err(PolyDynError::RayUnresolved(a)) => {
                    hs.push(hyp(H_PUZZLE, HypothesisState::Undetermined, format!("ray {a} did not land")));
                }
                Err(e) => return Err(e),
            }
            let par: Vec<String> =
                in_x.iter().filter(|r| r.kind == FixedKind::Parabolic).map(|r| fmt_pt(r.location)).collect();
            hs.push(if par.is_empty() {
                hyp(H_PARABOLIC_DOMAIN, HypothesisState::Holds, "no parabolic fixed point in X")
            } else {
                hyp(
                    H_PARABOLIC_DOMAIN,
                    HypothesisState::Undetermined,
                    format!("parabolic fixed points {} in X; basins are not examined", par.join(", ")),
                )
            });
        }
    }

    let odd: Vec<String> = in_x
        .iter()
        .filter(|r| !matches!(r.kind, FixedKind::Repelling | FixedKind::Parabolic))
        .map(|r| format!("{} is {:?}", fmt_pt(r.location), r.kind))
        .collect();
    hs.push(if odd.is_empty() {
        hyp(H_KINDS, HypothesisState::Holds, format!("{} fixed points in X", in_x.len()))
    } else {
        hyp(H_KINDS, HypothesisState::Fails, odd.join("; "))
    });

    let d = p.degree() as u32;
    let mut moved = Vec::new();
    let mut unknown = Vec::new();
    for r in in_x.iter().filter(|r| matches!(r.kind, FixedKind::Repelling | FixedKind::Parabolic)) {
        let fr = fixed_rays_at(p, r.location, instance.qmax, &opts.rays, tol)?;
        for a in &fr.angles {
            if a.sigma(d) != *a {
                moved.push(format!("at {}: {a} -> {}", fmt_pt(r.location), a.sigma(d)));
            }
        }
        if fr.angles.is_empty() {
            unknown.push(fmt_pt(r.location));
        }
    }
    hs.push(if !moved.is_empty() {
        hyp(H_RAYS, HypothesisState::Fails, moved.join("; "))
    } else if !unknown.is_empty() {
        hyp(
            H_RAYS,
            HypothesisState::Undetermined,
            format!("no landing ray of denominator <= {} at {}", instance.qmax, unknown.join(", ")),
        )
    } else {
        hyp(H_RAYS, HypothesisState::Holds, format!("denominators <= {}", instance.qmax))
    });

    let failed: Vec<String> = hs.iter().filter(|h| h.state == HypothesisState::Fails).map(|h| h.name.clone()).collect();
    let open: Vec<String> =
        hs.iter().filter(|h| h.state == HypothesisState::Undetermined).map(|h| h.name.clone()).collect();
    let verdict = if !failed.is_empty() {
        PointdynVerdict::HypothesisViolated { names: failed }
    } else if !open.is_empty() {
        PointdynVerdict::Inconclusive { names: open }
    } else if x_diameter > resolution {
        PointdynVerdict::ContradictionAlarm
    } else {
        PointdynVerdict::Consistent
    };
    Ok(done(hs, verdict))
}

fn exit_mapping(p: &Poly, exits: &[ExitSpec], wedges: &[Raster], eps: f64) -> Hypothesis {
    let mut bad = Vec::new();
    for (j, e) in exits.iter().enumerate() {
        if let Region::Point(q) = e.e {
            if Point::from_complex(p.eval(q.to_complex())).dist(q) <= eps {
                continue;
            }
        }
        let w = &wedges[j];
        let h = w.spec.h;
        let ok = e.e.sample(h).iter().all(|q| {
            let y = Point::from_complex(p.eval(q.to_complex()));
            w.spec.cell_of(y).is_some_and(|(i, k)| w.get(i, k))
        });
        if !ok {
            bad.push(j.to_string());
        }
    }
    if bad.is_empty() {
        hyp(H_EXITS, HypothesisState::Holds, format!("{} exits", exits.len()))
    } else {
        hyp(H_EXITS, HypothesisState::Fails, format!("exits {} leave their wedges", bad.join(", ")))
    }
}
