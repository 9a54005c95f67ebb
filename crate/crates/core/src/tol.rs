use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by all checks. `geom` and `fix` are relative
/// to the diameter of the curve or box at hand; `land` is absolute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub geom: f64,
    pub fix: f64,
    pub land: f64,
    /// Raster cells across the diameter of the scene.
    pub grid: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { geom: 1e-9, fix: 1e-9, land: 5e-3, grid: 512 }
    }
}

impl Tolerances {
    /// Absolute geometric tolerance at a given scale.
    pub fn geom_at(&self, diam: f64) -> f64 {
        self.geom * diam.max(1.0)
    }

    pub fn fix_at(&self, diam: f64) -> f64 {
        self.fix * diam.max(1.0)
    }

    /// Raster cell size for a scene of the given diameter.
    pub fn cell(&self, diam: f64) -> f64 {
        diam.max(1e-9) / self.grid.max(8) as f64
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("geom", self.geom), ("fix", self.fix), ("land", self.land)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if self.grid < 8 {
            return Err(format!("grid must be at least 8, got {}", self.grid));
        }
        Ok(())
    }
}
