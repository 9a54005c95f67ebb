//! Polynomial dynamics: multiplier classification, external rays traced by
//! pullback, landing and impression diagnostics, puzzle pieces, and the
//! point-degeneracy harness.

mod fixed;
mod impression;
mod normalize;
mod pointdyn;
mod puzzle;
mod ray;

pub use fixed::{classify_fixed, fixed_rays_at, rational_angles, FixedRays};
pub use impression::{impression_diameter_bound, ImpressionReport, ImpressionVerdict};
pub use normalize::Normalized;
pub use pointdyn::{
    pointdyn_harness, Hypothesis, HypothesisState, PointdynCase, PointdynInstance, PointdynReport, PointdynVerdict,
    H_KINDS, H_RAYS,
};
pub use puzzle::{
    filled_julia_raster, piece_from_seed, puzzle_piece_check, ExitReport, ExitSpec, PuzzleOptions, PuzzlePiece,
    PuzzleReport,
};
pub use ray::{connectedness_warning, orbit_type, trace_ray, trace_rays, Ray, RayOptions, RayStatus};

use thiserror::Error;

use crate::geometry::GeomError;
use crate::lamination::Angle;
use crate::map_analysis::AnalysisError;
use crate::poly::PolyError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyDynError {
    #[error("Newton pullback diverged at level {level}")]
    NewtonDivergence { level: usize },
    #[error("point is not fixed: |P(p) - p| = {0:e}")]
    NotFixed(f64),
    #[error("ray {0} did not land")]
    RayUnresolved(Angle),
    #[error("condition ({0}) failed: {1}")]
    ConditionFailed(u8, String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
