use super::IndexError;
use crate::geometry::{vector_degree, DegreeError, PlaneCurve, Point};
use crate::map::PlaneMap;
use crate::Tolerances;

fn require_simple_closed(s: &PlaneCurve) -> Result<(), IndexError> {
    if !s.is_closed() {
        return Err(IndexError::PreconditionViolated("curve must be closed".into()));
    }
    if let Some((i, j)) = s.first_self_intersection() {
        return Err(crate::geometry::GeomError::NotSimple(i, j).into());
    }
    Ok(())
}

/// Degree of `z -> (f(z) - w) / |f(z) - w|` along the closed curve `s`.
pub fn map_degree(f: &PlaneMap, s: &PlaneCurve, w: Point, tol: &Tolerances) -> Result<i64, IndexError> {
    require_simple_closed(s)?;
    let eps = tol.geom_at(s.diameter());
    vector_degree(s, |z| f.eval(z).map(|v| v - w), eps).map_err(|e| match e {
        DegreeError::Vanishes(p) => IndexError::ImageHitsBasepoint(p),
        DegreeError::Eval(m) => IndexError::Map(m),
    })
}

/// Index of `f` on `s`: the degree of the displacement direction `f(z) - z`.
pub fn fixed_point_index(f: &PlaneMap, s: &PlaneCurve, tol: &Tolerances) -> Result<i64, IndexError> {
    require_simple_closed(s)?;
    let eps = tol.fix_at(s.diameter());
    vector_degree(s, |z| f.eval(z).map(|v| v - z), eps).map_err(|e| match e {
        DegreeError::Vanishes(p) => IndexError::FixedPointOnCurve(p),
        DegreeError::Eval(m) => IndexError::Map(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64) -> PlaneCurve {
        PlaneCurve::circle(Point::ORIGIN, r, 64)
    }

    #[test]
    fn degrees() {
        let t = Tolerances::default();
        let sq = PlaneMap::real_poly(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(map_degree(&sq, &circle(1.0), Point::ORIGIN, &t).unwrap(), 2);
        let conj = PlaneMap::conjugation(2.0, 33);
        assert_eq!(map_degree(&conj, &circle(1.0), Point::ORIGIN, &t).unwrap(), -1);
        let five = PlaneMap::real_poly(&[5.0]).unwrap();
        assert_eq!(map_degree(&five, &circle(1.0), Point::ORIGIN, &t).unwrap(), 0);
    }

    #[test]
    fn indices() {
        let t = Tolerances::default();
        let half = PlaneMap::real_poly(&[0.0, 0.5]).unwrap();
        assert_eq!(fixed_point_index(&half, &circle(1.0), &t).unwrap(), 1);
        let shift = PlaneMap::real_poly(&[5.0, 1.0]).unwrap();
        assert_eq!(fixed_point_index(&shift, &circle(1.0), &t).unwrap(), 0);
        let sq = PlaneMap::real_poly(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(fixed_point_index(&sq, &circle(2.0), &t).unwrap(), 2);
    }

    #[test]
    fn fixed_point_on_curve_is_reported() {
        let t = Tolerances::default();
        let sq = PlaneMap::real_poly(&[0.0, 0.0, 1.0]).unwrap();
        // z^2 fixes 1, which is a vertex of the 64-gon
        assert!(matches!(fixed_point_index(&sq, &circle(1.0), &t), Err(IndexError::FixedPointOnCurve(_))));
    }
}
