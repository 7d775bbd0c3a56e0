use std::sync::Arc;

use num_complex::Complex64;

use crate::boettcher::{ChartMethod, ChartParams, CoordinateChart, LocalGerm, ModelMap};
use crate::error::{Error, Result};
use crate::maps::{RationalMap, SpherePoint};
use crate::series::PowerSeries;

/// Relative change between successive approximations that ends the iteration.
pub const KOENIGS_TOLERANCE: f64 = 1e-12;
pub const KOENIGS_N_MAX_DEFAULT: usize = 500;

const NEGLIGIBLE: f64 = 1e-150;
const ORBIT_CHECK: usize = 400;
const NEWTON_STEPS: usize = 60;
/// Largest local radius searched for the validity disk.
const RADIUS_CAP: f64 = 1.0;

/// Koenigs' coordinate `B = lim (f_n(z) - x)/λ^n` at an attracting fixed
/// point, solving `B∘f = λB` with `B(x) = 0`, `B'(x) = 1`.
pub fn koenigs(f: &RationalMap, x: SpherePoint, n_max: usize) -> Result<CoordinateChart> {
    koenigs_chart(LocalGerm::at(f, x)?, n_max)
}

fn attracting_multiplier(germ: &LocalGerm) -> Result<Complex64> {
    let lambda = if germ.degree() == 1 {
        germ.leading()
    } else {
        Complex64::new(0.0, 0.0)
    };
    let r = lambda.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::WrongFixedPointType {
            modulus: r,
            expected: "attracting (0 < |λ| < 1)",
        });
    }
    Ok(lambda)
}

/// Orbit of `w` contracts by at least `(1 + |λ|)/2` per step.
fn contracts_linearly(germ: &LocalGerm, rho: f64, w: Complex64) -> bool {
    let mut w = w;
    for _ in 0..ORBIT_CHECK {
        let r = w.norm();
        if r < NEGLIGIBLE {
            return true;
        }
        let next = germ.eval(w);
        if !(next.norm() <= rho * r) {
            return false;
        }
        w = next;
    }
    true
}

pub fn koenigs_chart(germ: LocalGerm, n_max: usize) -> Result<CoordinateChart> {
    let lambda = attracting_multiplier(&germ)?;
    let rho = 0.5 * (1.0 + lambda.norm());
    let radius = germ.largest_radius(RADIUS_CAP, |w| contracts_linearly(&germ, rho, w));
    let center = germ.center();
    let germ = Arc::new(germ);
    let evaluator = Arc::new(move |z: SpherePoint| -> Result<Complex64> {
        let w = germ.local(z)?;
        if w.norm() >= radius {
            return Err(crate::error::Error::OutsideValidity(format!(
                "{z} lies outside the chart disk of local radius {radius:e}"
            )));
        }
        koenigs_value(&germ, rho, w, n_max)
    });
    Ok(CoordinateChart::new(
        center,
        1,
        radius,
        ChartMethod::Koenigs,
        ModelMap::Linear { lambda },
        ChartParams {
            n_max,
            normalizer: Complex64::new(1.0, 0.0),
            ..Default::default()
        },
        None,
        evaluator,
    ))
}

/// `B(w) = w Π g(w_k)/(λ w_k)` along the orbit `w_k`.
fn koenigs_value(germ: &LocalGerm, rho: f64, w: Complex64, n_max: usize) -> Result<Complex64> {
    let mut b = w;
    let mut wk = w;
    for _ in 0..n_max {
        if wk.norm() < NEGLIGIBLE {
            return Ok(b);
        }
        let next = germ.eval(wk);
        if !(next.norm() <= rho * wk.norm()) {
            return Err(Error::OutsideValidity("orbit left the linear contraction region".into()));
        }
        let previous = b;
        b *= germ.ratio(wk);
        if (b - previous).norm() <= KOENIGS_TOLERANCE * b.norm() {
            return Ok(b);
        }
        wk = next;
    }
    Err(Error::IterationFailure(format!(
        "Koenigs iteration did not settle within {n_max} steps"
    )))
}

/// Koenigs coordinate at a repelling fixed point, obtained by linearizing the
/// local inverse branch `h = g^(-1)` (an attracting germ with multiplier
/// `1/λ`). The result still satisfies `B∘f = λB`.
pub fn koenigs_repelling(f: &RationalMap, x: SpherePoint, n_max: usize) -> Result<CoordinateChart> {
    let germ = LocalGerm::at(f, x)?;
    let lambda = if germ.degree() == 1 {
        germ.leading()
    } else {
        Complex64::new(0.0, 0.0)
    };
    if !(lambda.norm() > 1.0) {
        return Err(Error::WrongFixedPointType {
            modulus: lambda.norm(),
            expected: "repelling (|λ| > 1)",
        });
    }
    // g is univalent with |g'| >= (|λ|+1)/2 > 1 where |g' - λ| <= (|λ|-1)/2
    let slack = 0.5 * (lambda.norm() - 1.0);
    let radius = germ.largest_radius(RADIUS_CAP, |w| (germ.eval_with_derivative(w).1 - lambda).norm() <= slack);
    let center = germ.center();
    let germ = Arc::new(germ);
    let evaluator = Arc::new(move |z: SpherePoint| -> Result<Complex64> {
        let w = germ.local(z)?;
        if w.norm() >= radius {
            return Err(Error::OutsideValidity(format!(
                "{z} lies outside the chart disk of local radius {radius:e}"
            )));
        }
        let mut b = w;
        let mut wk = w;
        for _ in 0..n_max {
            if wk.norm() < NEGLIGIBLE {
                return Ok(b);
            }
            let next = inverse_branch(&germ, lambda, wk)?;
            let previous = b;
            b *= lambda * next / wk;
            if (b - previous).norm() <= KOENIGS_TOLERANCE * b.norm() {
                return Ok(b);
            }
            wk = next;
        }
        Err(Error::IterationFailure("inverse-branch iteration did not settle".into()))
    });
    Ok(CoordinateChart::new(
        center,
        1,
        radius,
        ChartMethod::Koenigs,
        ModelMap::Linear { lambda },
        ChartParams {
            n_max,
            normalizer: Complex64::new(1.0, 0.0),
            ..Default::default()
        },
        None,
        evaluator,
    ))
}

/// Solve `g(u) = t` for the branch with `u ≈ t/λ`, by Newton's method.
fn inverse_branch(germ: &LocalGerm, lambda: Complex64, t: Complex64) -> Result<Complex64> {
    let mut u = t / lambda;
    for _ in 0..NEWTON_STEPS {
        let (v, dv) = germ.eval_with_derivative(u);
        let step = (v - t) / dv;
        u -= step;
        if step.norm() <= 1e-16 * u.norm() {
            return Ok(u);
        }
    }
    let (v, _) = germ.eval_with_derivative(u);
    if (v - t).norm() <= 1e-13 * t.norm() {
        Ok(u)
    } else {
        Err(Error::IterationFailure("Newton solve for the inverse branch failed".into()))
    }
}

/// Taylor coefficients of `B` from the Schröder recursion
/// `b_n (λ - λ^n) = Σ_{k<n} b_k [g^k]_n`, `b_1 = 1`.
pub fn koenigs_series(germ: &LocalGerm, n_terms: usize) -> Result<PowerSeries> {
    if germ.degree() != 1 {
        return Err(Error::WrongFixedPointType {
            modulus: 0.0,
            expected: "non-critical fixed point",
        });
    }
    let lambda = germ.leading();
    let n = n_terms.max(2);
    let g = germ.series(n)?;
    let mut powers = vec![PowerSeries::constant(Complex64::new(1.0, 0.0), n), g.clone()];
    for k in 2..n {
        let next = &powers[k - 1] * &g;
        powers.push(next);
    }
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    b[1] = Complex64::new(1.0, 0.0);
    for j in 2..n {
        let mut s = Complex64::new(0.0, 0.0);
        for k in 1..j {
            s += b[k] * powers[k].coeff(j);
        }
        let denominator = lambda - lambda.powu(j as u32);
        if denominator.norm() < 1e-10 {
            return Err(Error::Resonance {
                index: j as i64,
                exponent: j.to_string(),
            });
        }
        b[j] = s / denominator;
    }
    Ok(PowerSeries::new(b, n))
}
