use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LaminationError;

/// A point of the circle `R / Z`, stored as a reduced fraction in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(Ratio<i64>);

impl Angle {
    pub fn new(p: i64, q: i64) -> Result<Self, LaminationError> {
        if q == 0 {
            return Err(LaminationError::InvalidAngle(format!("{p}/0")));
        }
        Ok(Angle::wrap(Ratio::new(p, q)))
    }

    fn wrap(r: Ratio<i64>) -> Self {
        let f = r - r.floor();
        Angle(f)
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Rotation by `r`.
    pub fn rotate(self, r: Ratio<i64>) -> Angle {
        Angle::wrap(self.0 + r)
    }

    /// `sigma_d`: multiplication by `d` mod 1.
    pub fn sigma(self, d: u32) -> Angle {
        Angle::wrap(self.0 * Ratio::from_integer(d as i64))
    }

    /// The `d` preimages under `sigma_d`, sorted.
    pub fn preimages(self, d: u32) -> Vec<Angle> {
        let d = d as i64;
        (0..d).map(|k| Angle::wrap((self.0 + Ratio::from_integer(k)) / Ratio::from_integer(d))).collect()
    }

    /// Length of the positive arc from `self` to `other`, in `[0, 1)`.
    pub fn arc_to(self, other: Angle) -> Ratio<i64> {
        let d = other.0 - self.0;
        if d < Ratio::zero() {
            d + Ratio::one()
        } else {
            d
        }
    }

    /// Circular distance, at most 1/2.
    pub fn distance(self, other: Angle) -> Ratio<i64> {
        let a = self.arc_to(other);
        let b = Ratio::one() - a;
        if a.is_zero() {
            a
        } else {
            a.min(b)
        }
    }

    /// Whether `self` lies in the open positive arc from `a` to `b`.
    pub fn in_open_arc(self, a: Angle, b: Angle) -> bool {
        let x = a.arc_to(self);
        !x.is_zero() && (a == b || x < a.arc_to(b))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Angle {
    type Err = LaminationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LaminationError::InvalidAngle(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => Angle::new(p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
            None => Angle::new(s.parse().map_err(|_| bad())?, 1),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// An equivalence class of angles: a point (1), a leaf (2) or a gap (3+).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct LamClass(Vec<Angle>);

impl<'de> Deserialize<'de> for LamClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        LamClass::new(Vec::<Angle>::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl LamClass {
    pub fn new(mut angles: Vec<Angle>) -> Result<Self, LaminationError> {
        angles.sort();
        if angles.is_empty() {
            return Err(LaminationError::InvalidClass("empty class".into()));
        }
        if angles.windows(2).any(|w| w[0] == w[1]) {
            return Err(LaminationError::InvalidClass("repeated angle".into()));
        }
        Ok(LamClass(angles))
    }

    /// Builds a class from `(p, q)` pairs.
    pub fn of(pairs: &[(i64, i64)]) -> Result<Self, LaminationError> {
        LamClass::new(pairs.iter().map(|&(p, q)| Angle::new(p, q)).collect::<Result<_, _>>()?)
    }

    fn from_sorted_dedup(mut angles: Vec<Angle>) -> Self {
        angles.sort();
        angles.dedup();
        LamClass(angles)
    }

    pub fn angles(&self) -> &[Angle] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_leaf(&self) -> bool {
        self.0.len() == 2
    }

    pub fn is_gap(&self) -> bool {
        self.0.len() >= 3
    }

    pub fn contains(&self, a: Angle) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn sigma(&self, d: u32) -> LamClass {
        LamClass::from_sorted_dedup(self.0.iter().map(|a| a.sigma(d)).collect())
    }

    pub fn rotate(&self, r: Ratio<i64>) -> LamClass {
        LamClass::from_sorted_dedup(self.0.iter().map(|a| a.rotate(r)).collect())
    }

    /// Consecutive pairs `(s, t)` in positive order, closing up cyclically:
    /// the complementary arcs of a gap and the chords of its hull boundary.
    pub fn arcs(&self) -> Vec<(Angle, Angle)> {
        let n = self.0.len();
        match n {
            0 | 1 => Vec::new(),
            2 => vec![(self.0[0], self.0[1]), (self.0[1], self.0[0])],
            _ => (0..n).map(|i| (self.0[i], self.0[(i + 1) % n])).collect(),
        }
    }

    /// Boundary chords of the convex hull: one for a leaf, `n` for a gap.
    pub fn chords(&self) -> Vec<(Angle, Angle)> {
        match self.0.len() {
            0 | 1 => Vec::new(),
            2 => vec![(self.0[0], self.0[1])],
            _ => self.arcs(),
        }
    }

    /// Largest circular distance between two angles of the class.
    pub fn diameter(&self) -> Ratio<i64> {
        let mut best = Ratio::zero();
        for (i, a) in self.0.iter().enumerate() {
            for b in &self.0[i + 1..] {
                best = best.max(a.distance(*b));
            }
        }
        best
    }

    /// Index of the complementary arc of `self` containing `x`, for `x`
    /// outside the class.
    fn arc_index(&self, x: Angle) -> usize {
        match self.0.binary_search(&x) {
            Ok(i) | Err(i) => i % self.0.len(),
        }
    }
}

impl fmt::Display for LamClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

pub fn sigma(d: u32, a: Angle) -> Angle {
    a.sigma(d)
}

pub fn sigma_class(d: u32, c: &LamClass) -> LamClass {
    c.sigma(d)
}

/// Whether the convex hulls of two disjoint classes are disjoint: all of
/// `c2` lies in one complementary arc of `c1`.
pub fn unlinked(c1: &LamClass, c2: &LamClass) -> Result<bool, LaminationError> {
    if let Some(a) = c2.0.iter().find(|a| c1.contains(**a)) {
        return Err(LaminationError::NotDisjoint(*a));
    }
    let first = c1.arc_index(c2.0[0]);
    Ok(c2.0.iter().all(|&a| c1.arc_index(a) == first))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: i64, q: i64) -> Angle {
        Angle::new(p, q).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(2, a(1, 3)), a(2, 3));
        assert_eq!(sigma(3, a(1, 4)), a(3, 4));
        assert_eq!(sigma_class(2, &LamClass::of(&[(1, 6), (2, 3)]).unwrap()), LamClass::of(&[(1, 3)]).unwrap());
    }

    #[test]
    fn unlinked_examples() {
        let c = |v: &[(i64, i64)]| LamClass::of(v).unwrap();
        assert!(unlinked(&c(&[(1, 3), (2, 3)]), &c(&[(1, 9), (2, 9)])).unwrap());
        assert!(!unlinked(&c(&[(0, 1), (1, 2)]), &c(&[(1, 4), (3, 4)])).unwrap());
        assert_eq!(unlinked(&c(&[(1, 3), (2, 3)]), &c(&[(1, 3), (5, 6)])), Err(LaminationError::NotDisjoint(a(1, 3))));
    }

    #[test]
    fn parsing_and_arcs() {
        let x: Angle = "7/5".parse().unwrap();
        assert_eq!(x, a(2, 5));
        assert!(a(1, 2).in_open_arc(a(1, 3), a(2, 3)));
        assert!(a(0, 1).in_open_arc(a(2, 3), a(1, 3)));
        assert!(!a(1, 3).in_open_arc(a(1, 3), a(2, 3)));
        assert_eq!(a(1, 6).distance(a(5, 6)), Ratio::new(1, 3));
    }
}
