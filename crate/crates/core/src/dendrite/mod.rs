//! Exact dynamics of edge-linear maps between finite trees: retraction,
//! boundary scrambling, fixed and periodic cutpoints, weak repelling.
//!
//! Every quantity is a [`BigRational`]; no floating point enters the
//! computations.

mod analysis;
mod map;
mod tree;

pub use analysis::{
    boundary_set, fixed_in_arc, fixed_points, periodic_cutpoints, retract, scrambles_boundary, weakly_repelling,
    FixedSegment, FixedSet, PeriodicCutpoint, PeriodicReport, WeakRepelWitness, WitnessKind, WEAK_REPEL_DEPTH,
};
pub use map::{full_tent, Piece, PieceImage, TreeMap};
pub use tree::{Leg, Tree, TreePoint};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DendriteError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid tree point: {0}")]
    InvalidPoint(String),
    #[error("invalid tree map: {0}")]
    InvalidMap(String),
    #[error("the map is not a self-map of its domain")]
    NotSelfMap,
    #[error("the point is not fixed by the iterate")]
    NotFixed,
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("no fixed point found: {0}")]
    NoFixedPoint(String),
}

/// Serde adapter writing rationals as `"n/d"` strings.
pub(crate) mod qstr {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| serde::de::Error::custom(format!("bad rational {s}")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Int {
    Small(i64),
    Big(String),
}

impl Int {
    fn of(b: &BigInt) -> Int {
        i64::try_from(b).map(Int::Small).unwrap_or_else(|_| Int::Big(b.to_string()))
    }

    fn big(&self) -> Result<BigInt, String> {
        match self {
            Int::Small(i) => Ok(BigInt::from(*i)),
            Int::Big(s) => s.parse().map_err(|_| format!("bad integer {s}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPoint {
    Vertex { vertex: usize },
    Edge(usize, Int, Int),
}

/// Vertices serialize as `{"vertex": v}`, edge points as `[edge, num, den]`.
impl Serialize for TreePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TreePoint::Vertex(v) => RawPoint::Vertex { vertex: *v },
            TreePoint::Edge { edge, t } => RawPoint::Edge(*edge, Int::of(t.numer()), Int::of(t.denom())),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TreePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RawPoint::deserialize(d)? {
            RawPoint::Vertex { vertex } => Ok(TreePoint::Vertex(vertex)),
            RawPoint::Edge(edge, n, den) => {
                let n = n.big().map_err(serde::de::Error::custom)?;
                let den = den.big().map_err(serde::de::Error::custom)?;
                if den == BigInt::from(0) {
                    return Err(serde::de::Error::custom("zero denominator"));
                }
                Ok(TreePoint::Edge { edge, t: Q::new(n, den) })
            }
        }
    }
}
