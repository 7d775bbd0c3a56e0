use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::chart::{outside, ChartMethod, ChartParams, CoordinateChart, ModelMap};
use super::germ::LocalGerm;
use crate::error::{Error, Result};
use crate::fixedpoints::poly_roots;
use crate::maps::{log1p, Polynomial, RationalMap, SpherePoint};

const LINE_SAMPLES: usize = 64;
const SIGMA_STEP: f64 = 0.01;
const SIGMA_SCAN: usize = 10_000;
const SIGMA_MARGIN: f64 = 1.0;

/// Logarithmic lift `Z ↦ mZ + Log(1 + Σ b_j e^(-jZ))` of the monic
/// conjugate `β f(ζ/β)` of a polynomial, valid on `Re Z > σ`.
#[derive(Debug, Clone)]
pub struct MilnorLift {
    degree: usize,
    /// `b_1, ..., b_m` of `ζ^m (1 + Σ b_j ζ^(-j))`.
    tail: Vec<Complex64>,
    beta: Complex64,
    sigma: f64,
    n_max: usize,
}

impl MilnorLift {
    pub fn new(f: &RationalMap, n_max: usize) -> Result<Self> {
        let p = f
            .as_polynomial()
            .ok_or_else(|| Error::InvalidInput("the logarithmic lift needs a polynomial map".into()))?;
        let m = p.degree();
        if m < 2 {
            return Err(Error::InvalidInput("polynomial degree must be at least 2".into()));
        }
        // β = 1/α for the germ at infinity, so the two normalizations agree
        let beta = LocalGerm::at(f, SpherePoint::Infinity)?.normalizer().inv();
        let mut pw = Complex64::new(1.0, 0.0);
        let mut monic = Vec::with_capacity(m + 1);
        for &c in p.coeffs() {
            monic.push(beta * c * pw);
            pw /= beta;
        }
        monic[m] = Complex64::new(1.0, 0.0);
        let tail: Vec<Complex64> = (1..=m).map(|j| monic[m - j]).collect();
        let mut lift = Self {
            degree: m,
            tail,
            beta,
            sigma: 0.0,
            n_max,
        };
        let roots = poly_roots(&Polynomial::new(monic))?;
        let rho = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let start = if rho > 0.0 { rho.ln().max(-1.0) } else { -1.0 };
        lift.sigma = lift.threshold(start)? + SIGMA_MARGIN;
        Ok(lift)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// `Log(1 + Σ b_j e^(-jZ))`, i.e. `log f(e^Z) - mZ` on the principal branch.
    fn correction(&self, z: Complex64) -> Complex64 {
        let e = (-z).exp();
        let u = self.tail.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &b| (acc + b) * e);
        log1p(u)
    }

    fn line_ok(&self, sigma: f64) -> bool {
        (0..LINE_SAMPLES).all(|k| {
            let t = 2.0 * PI * k as f64 / LINE_SAMPLES as f64;
            self.correction(Complex64::new(sigma, t)).norm() < 1.0
        })
    }

    fn threshold(&self, start: f64) -> Result<f64> {
        for k in 0..SIGMA_SCAN {
            let s = start + SIGMA_STEP * k as f64;
            if [0.0, 0.5, 1.0, 2.0].iter().all(|d| self.line_ok(s + d)) {
                return Ok(s);
            }
        }
        Err(Error::IterationFailure("no half-plane found for the logarithmic lift".into()))
    }

    /// `Φ(Z) = lim Z_k/m^k`, satisfying `Φ(F(Z)) = mΦ(Z)` and
    /// `Φ(Z + 2πi) = Φ(Z) + 2πi`. `Z` is in the lifted monic coordinate.
    pub fn phi_log(&self, z: Complex64) -> Result<Complex64> {
        if z.re < self.sigma {
            return Err(Error::OutsideValidity(format!(
                "Re Z = {} is below the half-plane threshold {}",
                z.re, self.sigma
            )));
        }
        let m = self.degree as f64;
        let mut phi = z;
        let mut zk = z;
        let mut power = m;
        for _ in 0..self.n_max {
            let t = self.correction(zk);
            let term = t / power;
            phi += term;
            if term.norm() <= 1e-17 * phi.norm().max(1.0) {
                break;
            }
            zk = zk * m + t;
            power *= m;
        }
        Ok(phi)
    }

    /// `φ(z) = exp(Φ(Log(βz)))`.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.phi_log((self.beta * z).ln())?.exp())
    }
}

/// Milnor's construction at infinity for a polynomial map.
pub fn boettcher_milnor(f: &RationalMap, n_max: usize) -> Result<CoordinateChart> {
    let lift = Arc::new(MilnorLift::new(f, n_max)?);
    let m = f.degree();
    // |βz| > e^σ, i.e. |1/z| < |β| e^(-σ)
    let radius = lift.beta.norm() * (-lift.sigma).exp();
    let params = ChartParams {
        n_max,
        sigma: Some(lift.sigma),
        normalizer: lift.beta.inv(),
        ..Default::default()
    };
    let l = lift.clone();
    let evaluator = Arc::new(move |z: SpherePoint| -> Result<Complex64> {
        match z {
            SpherePoint::Infinity => Err(Error::InvalidInput("the chart at infinity is infinite at its center".into())),
            SpherePoint::Finite(w) => {
                if w.norm_sqr() == 0.0 || w.inv().norm() >= radius {
                    return Err(outside(z, radius));
                }
                l.phi(w)
            }
        }
    });
    Ok(CoordinateChart::new(
        SpherePoint::Infinity,
        m,
        radius,
        ChartMethod::Milnor,
        ModelMap::Power { m },
        params,
        None,
        evaluator,
    ))
}
