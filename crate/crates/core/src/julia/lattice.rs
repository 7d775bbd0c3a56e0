use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Distance to a lattice point below which `℘` reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-9;
/// Default truncation radius in units of the longest generator.
pub const TRUNCATION_FACTOR: f64 = 20.0;

/// The period lattice `Λ = {mλ + nμ}` with its invariants `g2 = 60 Σ ω^-4`
/// and `g3 = 140 Σ ω^-6`, summed over `0 < |ω| <= truncation`.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeSpec {
    pub lambda: Complex64,
    pub mu: Complex64,
    pub g2: Complex64,
    pub g3: Complex64,
    pub truncation: f64,
    #[serde(skip)]
    points: Vec<Complex64>,
}

/// Gauss's lemniscate constant `π / agm(1, √2)`.
pub fn lemniscate_constant() -> f64 {
    let (mut a, mut b) = (1.0f64, 2f64.sqrt());
    while (a - b).abs() > 1e-16 * a {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    PI / a
}

impl LatticeSpec {
    /// Lattice with generators `λ`, `μ`; `truncation` defaults to
    /// `20 max(|λ|, |μ|)`.
    pub fn new(lambda: Complex64, mu: Complex64, truncation: Option<f64>) -> Result<Self> {
        if lambda.norm_sqr() == 0.0 || (mu / lambda).im.abs() < 1e-12 {
            return Err(Error::DegenerateLattice);
        }
        let rho = truncation.unwrap_or(TRUNCATION_FACTOR * lambda.norm().max(mu.norm()));
        if !(rho.is_finite() && rho > lambda.norm().max(mu.norm())) {
            return Err(Error::InvalidInput(format!(
                "truncation radius {rho} must exceed the generator lengths"
            )));
        }
        let area = (lambda.conj() * mu).im.abs();
        // spacing between parallel lattice lines bounds the index range
        let reach = (rho * lambda.norm().max(mu.norm()) / area).ceil() as i64 + 1;
        let mut points = Vec::new();
        for m in -reach..=reach {
            for n in -reach..=reach {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = lambda * m as f64 + mu * n as f64;
                if w.norm() <= rho {
                    points.push(w);
                }
            }
        }
        // small terms first keeps the sums accurate and the order fixed
        points.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
        let g2 = 60.0 * points.iter().map(|w| w.powi(-4)).sum::<Complex64>();
        let g3 = 140.0 * points.iter().map(|w| w.powi(-6)).sum::<Complex64>();
        Ok(Self {
            lambda,
            mu,
            g2,
            g3,
            truncation: rho,
            points,
        })
    }

    /// Square lattice `ϖ Z[i]`, whose invariants are `g2 = 4`, `g3 = 0`.
    pub fn lemniscatic() -> Self {
        let w = lemniscate_constant();
        Self::new(Complex64::new(w, 0.0), Complex64::new(0.0, w), None).expect("square lattice")
    }

    /// Nonzero lattice points inside the truncation disk, largest first.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn discriminant(&self) -> Complex64 {
        self.g2.powi(3) - 27.0 * self.g3 * self.g3
    }

    /// Representative of `z` modulo `Λ` in the cell around the origin.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let det = (self.lambda.conj() * self.mu).im;
        let a = (z.re * self.mu.im - z.im * self.mu.re) / det;
        let b = (self.lambda.re * z.im - self.lambda.im * z.re) / det;
        z - self.lambda * a.round() - self.mu * b.round()
    }

    /// Crude bound `4π|z| / (A ρ)` on the neglected part of the `℘` sum,
    /// `A` the cell area and `ρ` the truncation radius.
    pub fn tail_bound(&self, z: Complex64) -> f64 {
        let area = (self.lambda.conj() * self.mu).im.abs();
        4.0 * PI * self.reduce(z).norm() / (area * self.truncation)
    }
}

/// `℘(z) = 1/z² + Σ' [1/(z+ω)² - 1/ω²]`, summed directly over the truncated
/// lattice after reducing `z` modulo `Λ`.
pub fn weierstrass_p(lat: &LatticeSpec, z: Complex64) -> Result<Complex64> {
    let w = lat.reduce(z);
    if w.norm() < POLE_TOLERANCE {
        return Err(Error::Pole);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for &om in &lat.points {
        sum += (w + om).powi(-2) - om.powi(-2);
    }
    Ok(sum + w.powi(-2))
}
