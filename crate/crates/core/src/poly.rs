//! Complex polynomials: evaluation, derivatives, roots.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("polynomial needs at least one coefficient")]
    Empty,
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("degree {got} is below the required {need}")]
    DegreeTooLow { got: usize, need: usize },
}

/// Polynomial `c[0] + c[1] z + ... + c[d] z^d` with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(PolyError::Empty);
        }
        Ok(Poly { coeffs })
    }

    pub fn real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly { coeffs: vec![Complex64::new(0.0, 0.0)] };
        }
        let coeffs = self.coeffs[1..].iter().enumerate().map(|(k, &c)| c * (k as f64 + 1.0)).collect();
        Poly::new(coeffs).unwrap()
    }

    /// `self(z) - z`, whose roots are the fixed points.
    pub fn displacement(&self) -> Poly {
        let mut c = self.coeffs.clone();
        if c.len() < 2 {
            c.resize(2, Complex64::new(0.0, 0.0));
        }
        c[1] -= 1.0;
        Poly::new(c).unwrap()
    }

    /// `self(a z + b)`.
    pub fn compose_affine(&self, a: Complex64, b: Complex64) -> Poly {
        // Horner on polynomials: acc = acc * (a z + b) + c
        let mut acc: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
        for &c in self.coeffs.iter().rev() {
            let mut next = vec![Complex64::new(0.0, 0.0); acc.len() + 1];
            for (k, &v) in acc.iter().enumerate() {
                next[k] += v * b;
                next[k + 1] += v * a;
            }
            next[0] += c;
            acc = next;
        }
        Poly::new(acc).unwrap()
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect()).unwrap()
    }

    pub fn add_constant(&self, s: Complex64) -> Poly {
        let mut c = self.coeffs.clone();
        c[0] += s;
        Poly::new(c).unwrap()
    }

    /// All roots with multiplicity (Aberth iteration followed by Newton
    /// polishing). Returns an empty list for constants.
    pub fn roots(&self) -> Vec<Complex64> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let monic: Vec<Complex64> = self.coeffs.iter().map(|&c| c / lead).collect();
        let p = Poly { coeffs: monic };
        // Cauchy bound for the initial circle
        let bound = 1.0 + p.coeffs[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let r0 = bound.min(1e6) * 0.5 + 0.1;
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| Complex64::from_polar(r0, std::f64::consts::TAU * (k as f64 + 0.25) / d as f64 + 0.4))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..d {
                let (pv, dv) = p.eval_with_derivative(z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / dv;
                let s: Complex64 = (0..d)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let diff = z[i] - z[j];
                        if diff.norm() == 0.0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            1.0 / diff
                        }
                    })
                    .sum();
                let w = ratio / (1.0 - ratio * s);
                if w.re.is_finite() && w.im.is_finite() {
                    z[i] -= w;
                    moved = moved.max(w.norm() / (1.0 + z[i].norm()));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        z
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Real(f64),
    Complex([f64; 2]),
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<Coeff>::deserialize(d)?;
        let coeffs = raw
            .into_iter()
            .map(|c| match c {
                Coeff::Real(r) => Complex64::new(r, 0.0),
                Coeff::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect();
        Poly::new(coeffs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_and_derivative() {
        let p = Poly::real(&[1.0, -3.0, 0.0, 2.0]).unwrap();
        let z = c(0.5, -1.0);
        let (v, dv) = p.eval_with_derivative(z);
        assert!((v - (1.0 - 3.0 * z + 2.0 * z * z * z)).norm() < 1e-12);
        assert!((dv - p.derivative().eval(z)).norm() < 1e-12);
    }

    #[test]
    fn quadratic_roots() {
        let p = Poly::real(&[-1.0, -1.0, 1.0]).unwrap();
        let r = p.roots();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r[0] - c(1.0 - phi, 0.0)).norm() < 1e-12);
        assert!((r[1] - c(phi, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn affine_composition() {
        let p = Poly::real(&[0.0, 0.0, 1.0]).unwrap();
        let q = p.compose_affine(c(2.0, 0.0), c(1.0, 0.0));
        // (2z+1)^2 = 4z^2 + 4z + 1
        assert_eq!(q.coeffs(), &[c(1.0, 0.0), c(4.0, 0.0), c(4.0, 0.0)]);
    }

    #[test]
    fn mixed_coefficient_json() {
        let p: Poly = serde_json::from_str("[0, [0.5, -1], 1]").unwrap();
        assert_eq!(p.coeffs()[1], c(0.5, -1.0));
        assert!(serde_json::from_str::<Poly>("[]").is_err());
    }
}
