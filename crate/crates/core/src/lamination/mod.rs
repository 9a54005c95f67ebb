//! Finite invariant laminations of the circle under `sigma_d`: exact angle
//! dynamics, the invariance conditions, class types, pullback generation,
//! dual-tree quotients and the induced tree maps.

mod angle;
mod finite;
mod quotient;

pub use angle::{sigma, sigma_class, unlinked, Angle, LamClass};
pub use finite::{
    class_type, pullback_generate, pullback_with_report, Ambiguity, CheckStatus, ClassType, ConditionResult,
    FiniteLamination, InvarianceReport, PullbackReport,
};
pub use quotient::{
    lamwkrp_verify, quotient_tree, topological_polynomial, FaceKind, LamWkrpEntry, LamWkrpReport, Quotient,
    TopologicalPolynomial,
};

use thiserror::Error;

use crate::dendrite::DendriteError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaminationError {
    #[error("invalid angle {0}")]
    InvalidAngle(String),
    #[error("invalid class: {0}")]
    InvalidClass(String),
    #[error("degree must be at least 2, got {0}")]
    InvalidDegree(u32),
    #[error("classes share the angle {0}")]
    NotDisjoint(Angle),
    #[error("no valid pairing of preimages: {0}")]
    NoValidPairing(String),
    #[error("laminations are not compatible: {0}")]
    NotCompatible(String),
    #[error("invariance check failed: {0}")]
    InvariantFailed(String),
    #[error(transparent)]
    Dendrite(#[from] DendriteError),
}
