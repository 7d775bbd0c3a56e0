use std::sync::Arc;

use num_complex::Complex64;

use super::chart::{outside, ChartMethod, ChartParams, CoordinateChart, ModelMap};
use super::germ::LocalGerm;
use super::ritt::{require_superattracting, to_sphere_value, NEGLIGIBLE, STEP_TOLERANCE};
use crate::error::{Error, Result};
use crate::maps::{RationalMap, SpherePoint};

/// Böttcher's own scheme: `N(z) = lim (z_n - x)^(1/m^n)` on the raw map,
/// with the prefactor `(f^(m)(x)/m!)^(1/(m-1))` on the principal branch.
///
/// Evaluated as `N = w exp(Log(a)/(m-1) + Σ Log(g(w_k)/(a w_k^m))/m^(k+1))`.
pub fn boettcher_original(f: &RationalMap, x: SpherePoint, n_max: usize) -> Result<CoordinateChart> {
    original_chart(LocalGerm::at(f, x)?, n_max)
}

pub fn original_chart(germ: LocalGerm, n_max: usize) -> Result<CoordinateChart> {
    require_superattracting(&germ)?;
    let radius = germ.contraction_radius();
    let m = germ.degree();
    let center = germ.center();
    let prefactor = germ.leading().ln() / (m - 1) as f64;
    let germ = Arc::new(germ);
    let evaluator = Arc::new(move |z: SpherePoint| -> Result<Complex64> {
        let w = germ.local(z)?;
        if w.norm() >= radius {
            return Err(outside(z, radius));
        }
        let v = original_value(&germ, prefactor, w, n_max)?;
        to_sphere_value(center, v)
    });
    Ok(CoordinateChart::new(
        center,
        m,
        radius,
        ChartMethod::Original1904,
        ModelMap::Power { m },
        ChartParams {
            n_max,
            normalizer: prefactor.exp(),
            ..Default::default()
        },
        None,
        evaluator,
    ))
}

fn original_value(germ: &LocalGerm, prefactor: Complex64, w: Complex64, n_max: usize) -> Result<Complex64> {
    let m = germ.degree() as f64;
    let mut log_sum = prefactor;
    let mut wk = w;
    let mut power = m;
    for k in 0..n_max {
        if wk.norm() < NEGLIGIBLE {
            break;
        }
        let q = germ.ratio(wk);
        let next = germ.eval(wk);
        if !(q.norm() <= 2.0) || !(next.norm() < wk.norm()) {
            return Err(Error::OutsideValidity(format!(
                "orbit left the contraction region at step {}",
                k + 1
            )));
        }
        let term = q.ln() / power;
        log_sum += term;
        if term.norm() < STEP_TOLERANCE {
            break;
        }
        wk = next;
        power *= m;
    }
    Ok(w * log_sum.exp())
}
