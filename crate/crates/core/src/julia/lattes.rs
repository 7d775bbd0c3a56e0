use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::{Polynomial, RationalMap};

/// Relative size of `g2³ - 27 g3²` below which the lattice is degenerate.
pub const DISCRIMINANT_TOLERANCE: f64 = 1e-12;

/// The duplication map `R` with `℘(2z) = R(℘(z))`:
/// `R(z) = (z⁴ + g2 z²/2 + 2 g3 z + (g2/4)²) / (4z³ - g2 z - g3)`.
pub fn lattes_weierstrass(g2: Complex64, g3: Complex64) -> Result<RationalMap> {
    let disc = g2.powi(3) - 27.0 * g3 * g3;
    let scale = g2.norm().powi(3).max(27.0 * g3.norm_sqr()).max(1.0);
    if disc.norm() <= DISCRIMINANT_TOLERANCE * scale {
        return Err(Error::DegenerateLattice);
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let quarter = g2 / 4.0;
    let num = Polynomial::new(vec![quarter * quarter, 2.0 * g3, g2 / 2.0, zero, one]);
    let den = Polynomial::new(vec![-g3, -g2, zero, Complex64::new(4.0, 0.0)]);
    RationalMap::new(num, den)
}

/// `f(z) = 4z(1-z)(1-k²z) / (1-k²z²)²`, the everywhere chaotic map built
/// from the Jacobi `sn` function, taken exactly in this printed form.
pub fn lattes_sn(k: f64) -> Result<RationalMap> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::InvalidInput(format!("modulus k = {k} must lie in (0, 1)")));
    }
    let k2 = k * k;
    let num = &(&Polynomial::from_real(&[0.0, 4.0]) * &Polynomial::from_real(&[1.0, -1.0]))
        * &Polynomial::from_real(&[1.0, -k2]);
    let base = Polynomial::from_real(&[1.0, 0.0, -k2]);
    RationalMap::new(num, &base * &base)
}
