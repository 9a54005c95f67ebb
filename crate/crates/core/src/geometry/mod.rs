//! Discrete plane primitives: points, polygonal curves, winding numbers,
//! regions and their rasters, junctions and shadows.

mod curve;
mod junction;
mod point;
mod raster;
mod region;
pub mod segment;
mod shadow;
mod winding;

pub use curve::{CurveKind, PlaneCurve};
pub use junction::{build_junction, Junction, RayLabel};
pub use point::{BBox, Point};
pub use raster::{GridSpec, Raster};
pub use region::Region;
pub use shadow::{crosses_essentially, shadow};
pub use winding::{in_hull, vector_degree, winding_number, DegreeError};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("{kind:?} curve needs more distinct vertices (got {got})")]
    TooFewVertices { kind: CurveKind, got: usize },
    #[error("point lies on the curve (distance {distance:e})")]
    PointOnCurve { distance: f64 },
    #[error("curve is not simple: segments {0} and {1} meet")]
    NotSimple(usize, usize),
    #[error("junction vertex does not see infinity")]
    NoEscape,
    #[error("junction vertex escapes but no disjoint ray routing was found")]
    RoutingFailed,
    #[error("arc enters the interior of the region near ({}, {})", .0.x, .0.y)]
    ArcEntersInterior(Point),
    #[error("raster too large: {0} cells")]
    RasterTooLarge(usize),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
}
