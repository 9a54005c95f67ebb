use num_complex::Complex64;

use super::PolyDynError;
use crate::poly::Poly;

/// Monic centered conjugate `Q(w) = (P(a w + b) - b) / a` of a polynomial.
///
/// `a` is the principal `(d-1)`-th root of `1 / c_d` and `b = -c_{d-1} / (d c_d)`.
/// Angle 0 in the escape coordinate of `Q` is the positive real direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub original: Poly,
    pub q: Poly,
    pub a: Complex64,
    pub b: Complex64,
}

impl Normalized {
    pub fn new(p: &Poly) -> Result<Self, PolyDynError> {
        let d = p.degree();
        if d < 2 {
            return Err(PolyDynError::Invalid(format!("degree {d} is below 2")));
        }
        let cd = p.leading();
        let cd1 = p.coeffs()[d - 1];
        let a = (Complex64::new(1.0, 0.0) / cd).powf(1.0 / (d as f64 - 1.0));
        let b = -cd1 / (cd * d as f64);
        let mut q = p.compose_affine(a, b).add_constant(-b).scale(1.0 / a);
        // clean up roundoff in the two normalized coefficients
        let mut c = q.coeffs().to_vec();
        c[d] = Complex64::new(1.0, 0.0);
        c[d - 1] = Complex64::new(0.0, 0.0);
        q = Poly::new(c)?;
        Ok(Normalized { original: p.clone(), q, a, b })
    }

    pub fn degree(&self) -> usize {
        self.q.degree()
    }

    /// Original coordinate of a normalized point.
    pub fn to_original(&self, w: Complex64) -> Complex64 {
        self.a * w + self.b
    }

    pub fn to_normalized(&self, z: Complex64) -> Complex64 {
        (z - self.b) / self.a
    }
}
