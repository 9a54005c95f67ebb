use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{vector_degree, BBox, PlaneCurve, Point};
use crate::map::PlaneMap;
use crate::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationReport {
    pub class: Orientation,
    /// Degree of `f - w` on each sampled curve about an interior image point `w`.
    pub degrees: Vec<i64>,
    /// Trials skipped because the chosen `w` lay on the image curve.
    pub skipped: usize,
    pub note: String,
}

fn star_curve(rng: &mut ChaCha8Rng, b: &BBox) -> (PlaneCurve, Point) {
    let half = 0.5 * b.width().min(b.height());
    let c = Point::new(
        rng.gen_range(b.min.x + 0.4 * half..b.max.x - 0.4 * half),
        rng.gen_range(b.min.y + 0.4 * half..b.max.y - 0.4 * half),
    );
    let r = rng.gen_range(0.1..0.3) * half;
    let n = 24;
    let verts = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            c + Point::polar(r * rng.gen_range(0.7..1.3), t)
        })
        .collect();
    let s = PlaneCurve::closed(verts).expect("star curve has distinct vertices");
    // star-shaped about c, so points near c are inside
    let z0 = c + Point::polar(0.3 * r * rng.gen::<f64>(), rng.gen_range(0.0..std::f64::consts::TAU));
    (s, z0)
}

/// Samples random simple closed curves `S` and points `z0` inside them and
/// records the degree of `f - f(z0)` on `S`. Positive if every sampled degree
/// is positive, negative if every one is negative. This is a necessary
/// condition only; it does not decide the orientation of the map.
pub fn orientation_class(f: &PlaneMap, trials: usize, seed: u64, tol: &Tolerances) -> OrientationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = f.domain().unwrap_or_else(|| BBox::square(Point::ORIGIN, 2.0));
    let mut degrees = Vec::new();
    let mut skipped = 0;
    for _ in 0..trials.max(1) {
        let (s, z0) = star_curve(&mut rng, &b);
        let Ok(w) = f.eval(z0) else {
            skipped += 1;
            continue;
        };
        let eps = tol.geom_at(s.diameter()) * 1e3;
        match vector_degree(&s, |z| f.eval(z).map(|v| v - w), eps) {
            Ok(d) => degrees.push(d),
            Err(_) => skipped += 1,
        }
    }
    let class = if !degrees.is_empty() && degrees.iter().all(|&d| d > 0) {
        Orientation::Positive
    } else if !degrees.is_empty() && degrees.iter().all(|&d| d < 0) {
        Orientation::Negative
    } else {
        Orientation::Undetermined
    };
    OrientationReport { class, degrees, skipped, note: "sampled necessary condition; confluence is not tested".into() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes() {
        let t = Tolerances::default();
        let sq = PlaneMap::real_poly(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(orientation_class(&sq, 20, 7, &t).class, Orientation::Positive);
        let conj = PlaneMap::conjugation(2.0, 41);
        assert_eq!(orientation_class(&conj, 20, 7, &t).class, Orientation::Negative);
        let m2 = PlaneMap::modulus_squared(2.0, 41);
        assert_eq!(orientation_class(&m2, 20, 7, &t).class, Orientation::Undetermined);
    }
}
