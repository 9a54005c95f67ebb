//! Degree of a map on a curve, fixed-point index, variation of bumping arcs,
//! allowable partitions and the index–variation identity.

mod degree;
mod partition;
mod variation;

pub use degree::{fixed_point_index, map_degree};
pub use partition::{
    find_allowable_partition, find_allowable_partition_with, fmot_verify, AllowablePartition, FmotReport,
};
pub use variation::{
    close_arc, outward_heading, variation, variation_auto, variation_oracle, variation_oracle_with, Crossing, Hit,
    VariationReport,
};

use thiserror::Error;

use crate::geometry::{GeomError, PlaneCurve, Point};
use crate::map::{MapError, PlaneMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("image of the curve passes within tolerance of the base point near ({}, {})", .0.x, .0.y)]
    ImageHitsBasepoint(Point),
    #[error("fixed point on the curve near ({}, {})", .0.x, .0.y)]
    FixedPointOnCurve(Point),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("junction meets the image of an arc endpoint and perturbation did not help")]
    JunctionTouchesImageOfEndpoints,
    #[error("no return path inside the region avoids the junction")]
    CannotCloseArc,
    #[error("no allowable partition: {0}")]
    NoPartition(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// One sample of a curve and its image.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ImageSample {
    /// Arclength along the curve.
    pub s: f64,
    pub z: Point,
    pub fz: Point,
}

const IMAGE_DEPTH: u32 = 30;

/// Samples `curve` so that consecutive images are at most `max_chord` apart.
pub(crate) fn image_samples(f: &PlaneMap, curve: &PlaneCurve, max_chord: f64) -> Result<Vec<ImageSample>, MapError> {
    let cum = curve.cumulative_lengths();
    let mut out = Vec::new();
    let m = curve.num_segments();
    for i in 0..m {
        let (a, b) = curve.segment_at(i);
        let (s0, s1) = (cum[i], cum[i + 1]);
        let fa = f.eval(a)?;
        let fb = f.eval(b)?;
        let first = ImageSample { s: s0, z: a, fz: fa };
        if i == 0 {
            out.push(first);
        }
        refine(f, first, ImageSample { s: s1, z: b, fz: fb }, max_chord, 0, &mut out)?;
    }
    Ok(out)
}

fn refine(
    f: &PlaneMap,
    p: ImageSample,
    q: ImageSample,
    max_chord: f64,
    depth: u32,
    out: &mut Vec<ImageSample>,
) -> Result<(), MapError> {
    if p.fz.dist(q.fz) <= max_chord || depth >= IMAGE_DEPTH {
        out.push(q);
        return Ok(());
    }
    let z = p.z.lerp(q.z, 0.5);
    let m = ImageSample { s: 0.5 * (p.s + q.s), z, fz: f.eval(z)? };
    refine(f, p, m, max_chord, depth + 1, out)?;
    refine(f, m, q, max_chord, depth + 1, out)
}

/// Smallest distance between the polyline through `pts` and the curve.
pub(crate) fn polyline_curve_distance(pts: &[Point], curve: &PlaneCurve) -> f64 {
    use crate::geometry::segment::segment_segment_distance;
    let cb = curve.bbox();
    let mut best = f64::INFINITY;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        // cheap rejection against the curve's box
        let dx = (cb.min.x - a.x.max(b.x)).max(a.x.min(b.x) - cb.max.x).max(0.0);
        let dy = (cb.min.y - a.y.max(b.y)).max(a.y.min(b.y) - cb.max.y).max(0.0);
        if dx.hypot(dy) >= best {
            continue;
        }
        for (p, q) in curve.segments() {
            best = best.min(segment_segment_distance(a, b, p, q));
        }
    }
    best
}
