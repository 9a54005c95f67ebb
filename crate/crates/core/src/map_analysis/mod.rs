//! Orientation sampling, fixed-point localization and classification,
//! boundary scrambling, and the repelling-outside witness.

mod degeneracy;
mod fixed;
mod orient;
mod repel;
mod scramble;

pub use degeneracy::{degeneracy_check, DegeneracyReport, HypothesisStatus};
pub use fixed::{
    classify_multiplier, local_index, locate_fixed_points, topological_type, FixedKind, FixedPointRecord,
    TopologicalType,
};
pub use orient::{orientation_class, Orientation, OrientationReport};
pub use repel::{repels_outside_witness, RepelOptions, RepelWitness};
pub use scramble::{
    fixpt_theorem_check, scramble_check, Clause, Exit, FixptReport, ScrambleConfig, ScrambleReport, ScrambleVerdict,
};

use thiserror::Error;

use crate::geometry::GeomError;
use crate::index_var::IndexError;
use crate::map::MapError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("local index did not stabilize under radius halving")]
    NotIsolated,
    #[error("a fixed point stays on the subdivision grid after jittering")]
    BoundaryFixedPoint,
    #[error("invalid scrambling configuration: {0}")]
    ConfigInvalid(String),
    #[error("hypothesis ({0}) failed: {1}")]
    HypothesisFailed(u8, String),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
