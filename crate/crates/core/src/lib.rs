//! Fixed-point index and variation machinery for plane maps, exact tree and
//! lamination dynamics, and external-ray diagnostics for polynomials.

pub mod geometry;
pub mod tol;

pub use tol::Tolerances;
pub mod dendrite;
pub mod index_var;
pub mod lamination;
pub mod map;
pub mod map_analysis;
pub mod poly;
pub mod polydyn;
