//! Canonical form for quadratic polynomials `Az^2 + 2Bz + C`.

use num_complex::Complex64;

use super::{MoebiusMap, Polynomial};
use crate::error::{Error, Result};

/// `f = Az^2 + 2Bz + C` is conjugate to `φ(z) = z^2 + T` with
/// `T = AC - B^2 + B`, through `ω1(z) = (z - B)/A` (`ω1∘φ = f∘ω1`) and
/// `ω2(z) = Az + B` (`ω2∘f = φ∘ω2`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticNormalForm {
    pub t: Complex64,
    pub omega1: MoebiusMap,
    pub omega2: MoebiusMap,
}

/// The quadratic `Az^2 + 2Bz + C` as a polynomial.
pub fn quadratic(a: Complex64, b: Complex64, c: Complex64) -> Polynomial {
    Polynomial::new(vec![c, b * 2.0, a])
}

pub fn normalize_quadratic(a: Complex64, b: Complex64, c: Complex64) -> Result<QuadraticNormalForm> {
    if a.norm_sqr() == 0.0 {
        return Err(Error::NotQuadratic);
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(QuadraticNormalForm {
        t: a * c - b * b + b,
        omega1: MoebiusMap::new(one, -b, zero, a)?,
        omega2: MoebiusMap::new(a, b, zero, one)?,
    })
}

impl QuadraticNormalForm {
    /// `φ(z) = z^2 + T`
    pub fn canonical(&self) -> Polynomial {
        Polynomial::new(vec![self.t, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }
}

/// An affine Möbius map `αz + β` as a polynomial (panics when `C != 0`).
pub fn affine_polynomial(m: &MoebiusMap) -> Polynomial {
    assert!(m.c.norm_sqr() == 0.0, "map is not affine");
    Polynomial::new(vec![m.b / m.d, m.a / m.d])
}
