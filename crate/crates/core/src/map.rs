//! Continuous self-maps of the plane: exact polynomials or sampled grids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BBox, Point};
use crate::poly::{Poly, PolyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("point ({x}, {y}) lies outside the sampled grid")]
    OutsideGrid { x: f64, y: f64 },
    #[error("map value is not finite")]
    NonFinite,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid grid map: {0}")]
    InvalidGrid(String),
}

/// Vector values on the nodes `origin + (i h, j h)`, `0 <= i < nx`,
/// `0 <= j < ny`, interpolated bilinearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFile")]
pub struct GridMap {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Point>,
}

#[derive(Deserialize)]
struct GridFile {
    origin: Point,
    h: f64,
    nx: usize,
    ny: usize,
    values: Vec<Point>,
}

impl TryFrom<GridFile> for GridMap {
    type Error = MapError;
    fn try_from(g: GridFile) -> Result<Self, MapError> {
        GridMap::new(g.origin, g.h, g.nx, g.ny, g.values)
    }
}

impl GridMap {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize, values: Vec<Point>) -> Result<Self, MapError> {
        if nx < 2 || ny < 2 || values.len() != nx * ny {
            return Err(MapError::InvalidGrid(format!("{nx}x{ny} nodes with {} values", values.len())));
        }
        if h.is_nan() || h <= 0.0 || !origin.is_finite() {
            return Err(MapError::InvalidGrid("node spacing must be positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MapError::NonFinite);
        }
        Ok(GridMap { origin, h, nx, ny, values })
    }

    /// Samples `f` on a square grid of `n x n` nodes spanning `b`'s larger side.
    pub fn sample(b: &BBox, n: usize, f: impl Fn(Point) -> Point) -> Result<Self, MapError> {
        let n = n.max(2);
        let side = b.width().max(b.height());
        let h = side / (n - 1) as f64;
        let origin = b.min;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                values.push(f(Point::new(origin.x + i as f64 * h, origin.y + j as f64 * h)));
            }
        }
        GridMap::new(origin, h, n, n, values)
    }

    pub fn bbox(&self) -> BBox {
        BBox::new(
            self.origin,
            Point::new(self.origin.x + (self.nx - 1) as f64 * self.h, self.origin.y + (self.ny - 1) as f64 * self.h),
        )
    }

    pub fn eval(&self, p: Point) -> Result<Point, MapError> {
        let u = (p.x - self.origin.x) / self.h;
        let v = (p.y - self.origin.y) / self.h;
        let slack = 1e-9;
        let (mx, my) = ((self.nx - 1) as f64, (self.ny - 1) as f64);
        if !(u >= -slack && v >= -slack && u <= mx + slack && v <= my + slack) {
            return Err(MapError::OutsideGrid { x: p.x, y: p.y });
        }
        let u = u.clamp(0.0, mx);
        let v = v.clamp(0.0, my);
        let i = (u.floor() as usize).min(self.nx - 2);
        let j = (v.floor() as usize).min(self.ny - 2);
        let (s, t) = (u - i as f64, v - j as f64);
        let at = |a: usize, b: usize| self.values[b * self.nx + a];
        let bottom = at(i, j).lerp(at(i + 1, j), s);
        let top = at(i, j + 1).lerp(at(i + 1, j + 1), s);
        Ok(bottom.lerp(top, t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneMap {
    Polynomial(Poly),
    Grid(GridMap),
}

impl PlaneMap {
    pub fn poly(p: Poly) -> Self {
        PlaneMap::Polynomial(p)
    }

    /// Polynomial with real coefficients, constant term first.
    pub fn real_poly(coeffs: &[f64]) -> Result<Self, MapError> {
        Ok(PlaneMap::Polynomial(Poly::real(coeffs)?))
    }

    /// Complex conjugation sampled on the square `[-r, r]^2`.
    pub fn conjugation(r: f64, n: usize) -> Self {
        let b = BBox::square(Point::ORIGIN, r);
        PlaneMap::Grid(GridMap::sample(&b, n, |p| Point::new(p.x, -p.y)).unwrap())
    }

    /// The real-valued map `z -> |z|^2` sampled on `[-r, r]^2`.
    pub fn modulus_squared(r: f64, n: usize) -> Self {
        let b = BBox::square(Point::ORIGIN, r);
        PlaneMap::Grid(GridMap::sample(&b, n, |p| Point::new(p.dot(p), 0.0)).unwrap())
    }

    pub fn eval(&self, p: Point) -> Result<Point, MapError> {
        let v = match self {
            PlaneMap::Polynomial(q) => Point::from_complex(q.eval(p.to_complex())),
            PlaneMap::Grid(g) => g.eval(p)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(MapError::NonFinite)
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            PlaneMap::Polynomial(p) => Some(p),
            PlaneMap::Grid(_) => None,
        }
    }

    /// Box outside of which the map is undefined, if any.
    pub fn domain(&self) -> Option<BBox> {
        match self {
            PlaneMap::Polynomial(_) => None,
            PlaneMap::Grid(g) => Some(g.bbox()),
        }
    }

    /// Derivative for polynomials.
    pub fn derivative_at(&self, p: Point) -> Option<Complex64> {
        self.as_poly().map(|q| q.derivative().eval(p.to_complex()))
    }
}
