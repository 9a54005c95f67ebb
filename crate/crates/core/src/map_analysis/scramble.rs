use serde::{Deserialize, Serialize};

use super::{locate_fixed_points, AnalysisError, FixedPointRecord};
use crate::geometry::{BBox, GridSpec, Point, Raster, Region};
use crate::map::PlaneMap;
use crate::Tolerances;

/// An exit continuum `k = z ∩ X` together with the set `z` it opens into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exit {
    pub z: Region,
    pub k: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScrambleConfig {
    pub x: Region,
    #[serde(default)]
    pub exits: Vec<Exit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Clause {
    #[serde(rename = "1")]
    ImageInExits,
    #[serde(rename = "2")]
    ExitContinua,
    #[serde(rename = "3")]
    ExitsNotPushedInward,
    #[serde(rename = "3a")]
    ExitsInvariantOrCleared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScrambleVerdict {
    None,
    Scrambles,
    Strongly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScrambleReport {
    pub verdict: ScrambleVerdict,
    /// Every violated clause, in clause order.
    pub violated: Vec<Clause>,
    /// Spacing of the sample points on `X` and on the exit continua.
    pub spacing: f64,
    /// Membership tolerance.
    pub tolerance: f64,
}

impl ScrambleReport {
    pub fn first_violated(&self) -> Option<Clause> {
        self.violated.first().copied()
    }
}

fn scene_bbox(cfg: &ScrambleConfig) -> BBox {
    cfg.exits.iter().fold(cfg.x.bbox(), |b, e| b.union(&e.z.bbox()))
}

fn scene_grid(cfg: &ScrambleConfig, tol: &Tolerances) -> Result<GridSpec, AnalysisError> {
    let b = scene_bbox(cfg);
    Ok(GridSpec::covering(&b, tol.cell(b.diameter()), 4)?)
}

fn structural_checks(cfg: &ScrambleConfig, spec: GridSpec, tol: &Tolerances) -> Result<Vec<Raster>, AnalysisError> {
    let invalid = |m: String| Err(AnalysisError::ConfigInvalid(m));
    cfg.x.validate()?;
    if !cfg.x.is_non_separating(tol.grid) {
        return invalid("X separates the plane".into());
    }
    let mut zs: Vec<Raster> = Vec::with_capacity(cfg.exits.len());
    for (i, e) in cfg.exits.iter().enumerate() {
        e.z.validate()?;
        e.k.validate()?;
        if !e.z.is_non_separating(tol.grid) {
            return invalid(format!("Z_{} separates the plane", i + 1));
        }
        let zr = e.z.rasterize(spec);
        if let Some(j) = zs.iter().position(|o| o.intersects(&zr)) {
            return invalid(format!("Z_{} and Z_{} intersect", j + 1, i + 1));
        }
        zs.push(zr);
    }
    Ok(zs)
}

/// Checks the scrambling clauses on samples of `X` and the exit continua.
pub fn scramble_check(f: &PlaneMap, cfg: &ScrambleConfig, tol: &Tolerances) -> Result<ScrambleReport, AnalysisError> {
    let spec = scene_grid(cfg, tol)?;
    let zs = structural_checks(cfg, spec, tol)?;
    let diam = scene_bbox(cfg).diameter();
    let spacing = diam / (tol.grid.min(256) as f64);
    let mt = tol.geom_at(diam);
    let mut violated = Vec::new();

    // (1) f(X) \ X lies in the union of the Z_i
    let mut c1 = true;
    for x in cfg.x.sample(spacing) {
        let y = f.eval(x)?;
        if !cfg.x.contains(y, mt) && !cfg.exits.iter().any(|e| e.z.contains(y, mt)) {
            c1 = false;
            break;
        }
    }
    if !c1 {
        violated.push(Clause::ImageInExits);
    }

    // (2) Z_i ∩ X is a non-separating continuum containing the declared K_i
    let xr = cfg.x.rasterize(spec);
    let mut c2 = true;
    for (e, zr) in cfg.exits.iter().zip(&zs) {
        let meet = zr.intersection(&xr);
        let declared_ok = e.k.sample(spacing).iter().all(|&p| cfg.x.contains(p, mt) && e.z.contains(p, mt));
        if meet.is_empty() || !meet.is_connected() || meet.separates_plane() || !declared_ok {
            c2 = false;
        }
    }
    if !c2 {
        violated.push(Clause::ExitContinua);
    }

    // (3) and (3a) on images of the exit continua
    let mut c3 = true;
    let mut c3a = true;
    for e in &cfg.exits {
        let imgs: Vec<Point> = e.k.sample(spacing).into_iter().map(|p| f.eval(p)).collect::<Result<_, _>>()?;
        let into_z_minus_k = imgs.iter().any(|&y| e.z.contains(y, mt) && e.k.distance(y) > mt);
        if into_z_minus_k {
            c3 = false;
        }
        let inside_k = imgs.iter().all(|&y| e.k.contains(y, mt));
        let clear_of_z = imgs.iter().all(|&y| !e.z.contains(y, mt));
        if !(inside_k || clear_of_z) {
            c3a = false;
        }
    }
    if !c3 {
        violated.push(Clause::ExitsNotPushedInward);
    }
    if !c3a {
        violated.push(Clause::ExitsInvariantOrCleared);
    }
    let verdict = if c1 && c2 && c3a {
        ScrambleVerdict::Strongly
    } else if c1 && c2 && c3 {
        ScrambleVerdict::Scrambles
    } else {
        ScrambleVerdict::None
    };
    Ok(ScrambleReport { verdict, violated, spacing, tolerance: mt })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixptReport {
    pub applicable: bool,
    pub scramble: ScrambleReport,
    pub fixed_point: Option<FixedPointRecord>,
    /// Strong scrambling was certified yet no fixed point was found in X:
    /// a numerical fault, never a counterexample.
    pub fault: bool,
}

/// When `f` strongly scrambles the boundary of `X`, searches `X` for the
/// fixed point that must exist.
pub fn fixpt_theorem_check(f: &PlaneMap, cfg: &ScrambleConfig, tol: &Tolerances) -> Result<FixptReport, AnalysisError> {
    let scramble = scramble_check(f, cfg, tol)?;
    if scramble.verdict != ScrambleVerdict::Strongly {
        return Ok(FixptReport { applicable: false, scramble, fixed_point: None, fault: false });
    }
    let xb = cfg.x.bbox();
    let pad = 0.05 * xb.diameter().max(1e-3);
    let mut b = xb.expand(pad);
    if let Some(d) = f.domain() {
        b = BBox::new(
            Point::new(b.min.x.max(d.min.x), b.min.y.max(d.min.y)),
            Point::new(b.max.x.min(d.max.x), b.max.y.min(d.max.y)),
        );
    }
    let recs = locate_fixed_points(f, &b, tol)?;
    let near = tol.fix_at(b.diameter()).max(1e-6 * b.diameter());
    let fixed_point = recs.into_iter().find(|r| cfg.x.contains(r.location, near));
    let fault = fixed_point.is_none();
    Ok(FixptReport { applicable: true, scramble, fixed_point, fault })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PlaneCurve;

    fn thin_rect(x0: f64, x1: f64, h: f64) -> Region {
        Region::Filled(PlaneCurve::rectangle(&BBox::new(Point::new(x0, -h), Point::new(x1, h))))
    }

    fn segment_config() -> ScrambleConfig {
        ScrambleConfig {
            x: Region::segment(Point::new(-1.0, 0.0), Point::new(1.0, 0.0)),
            exits: vec![
                Exit { z: thin_rect(-2.0, -1.0, 0.05), k: Region::Point(Point::new(-1.0, 0.0)) },
                Exit { z: thin_rect(1.0, 2.0, 0.05), k: Region::Point(Point::new(1.0, 0.0)) },
            ],
        }
    }

    #[test]
    fn invariant_disk_strongly_scrambles() {
        let t = Tolerances::default();
        let cfg = ScrambleConfig { x: Region::Filled(PlaneCurve::circle(Point::ORIGIN, 1.0, 64)), exits: vec![] };
        let f = PlaneMap::real_poly(&[0.0, 0.5]).unwrap();
        assert_eq!(scramble_check(&f, &cfg, &t).unwrap().verdict, ScrambleVerdict::Strongly);
        let r = fixpt_theorem_check(&f, &cfg, &t).unwrap();
        assert!(r.applicable && !r.fault);
        assert!(r.fixed_point.unwrap().location.norm() < 1e-9);
    }

    #[test]
    fn flipped_doubling_on_segment() {
        let t = Tolerances::default();
        let f = PlaneMap::real_poly(&[0.0, -2.0]).unwrap();
        let rep = scramble_check(&f, &segment_config(), &t).unwrap();
        assert_eq!(rep.verdict, ScrambleVerdict::Strongly, "{rep:?}");
        let r = fixpt_theorem_check(&f, &segment_config(), &t).unwrap();
        assert!(r.fixed_point.unwrap().location.norm() < 1e-9);
    }

    #[test]
    fn doubling_pushes_exit_inward() {
        let t = Tolerances::default();
        let f = PlaneMap::real_poly(&[0.0, 2.0]).unwrap();
        let cfg = ScrambleConfig {
            x: Region::Filled(PlaneCurve::rectangle(&BBox::new(Point::new(-1.0, -0.1), Point::new(1.0, 0.1)))),
            exits: vec![Exit {
                z: Region::Filled(PlaneCurve::rectangle(&BBox::new(Point::new(1.0, -0.1), Point::new(2.5, 0.1)))),
                k: Region::segment(Point::new(1.0, -0.1), Point::new(1.0, 0.1)),
            }],
        };
        let rep = scramble_check(&f, &cfg, &t).unwrap();
        assert_eq!(rep.verdict, ScrambleVerdict::None);
        assert!(rep.violated.contains(&Clause::ExitsNotPushedInward));
    }

    #[test]
    fn translation_is_not_applicable() {
        let t = Tolerances::default();
        let f = PlaneMap::real_poly(&[5.0, 1.0]).unwrap();
        let r = fixpt_theorem_check(&f, &segment_config(), &t).unwrap();
        assert!(!r.applicable);
        assert_eq!(r.scramble.first_violated(), Some(Clause::ImageInExits));
    }

    #[test]
    fn overlapping_exits_are_invalid() {
        let t = Tolerances::default();
        let mut cfg = segment_config();
        cfg.exits[0].z = thin_rect(-2.0, 1.5, 0.05);
        let f = PlaneMap::real_poly(&[0.0, -2.0]).unwrap();
        assert!(matches!(scramble_check(&f, &cfg, &t), Err(AnalysisError::ConfigInvalid(_))));
    }
}
