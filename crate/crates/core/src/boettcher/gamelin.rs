use std::sync::Arc;

use num_complex::Complex64;

use super::chart::{outside, ChartMethod, ChartParams, CoordinateChart, ModelMap};
use super::germ::LocalGerm;
use super::ritt::{require_superattracting, to_sphere_value};
use crate::error::{Error, Result};
use crate::maps::{RationalMap, SpherePoint};
use crate::series::PowerSeries;

pub const N_TERMS_DEFAULT: usize = 32;
/// Smallest working disk before the construction gives up.
pub const MIN_DISK: f64 = 1e-6;
/// Largest relative size of the last few retained terms on the working disk.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Series solution of the resolvent equation `(mI - T)G = h`:
/// `G = Σ h∘g_k / m^(k+1)` with `h = log(g(v)/v^m)` for the normalized germ,
/// and `F(v) = v exp(G(v))`.
pub fn boettcher_series(f: &RationalMap, x: SpherePoint, n_terms: usize) -> Result<CoordinateChart> {
    series_chart(LocalGerm::at(f, x)?, n_terms)
}

/// Coefficients of `F` in the normalized coordinate `v`.
pub fn boettcher_coefficients(germ: &LocalGerm, n_terms: usize) -> Result<PowerSeries> {
    require_superattracting(germ)?;
    let n = n_terms.max(2);
    let m = germ.degree();
    let alpha = germ.normalizer();
    let ghat = germ.series(n)?.rescaled(alpha.inv()).scaled(alpha);
    let mut q = ghat.shift_down(m).truncated(n);
    if (q.coeff(0) - 1.0).norm() > 1e-9 {
        return Err(Error::InvalidInput("normalized germ is not monic".into()));
    }
    q = {
        let mut c = q.coeffs().to_vec();
        c[0] = Complex64::new(1.0, 0.0);
        PowerSeries::new(c, n)
    };
    let h = q.log()?;
    let mut g = PowerSeries::zero(n);
    let mut iterate = PowerSeries::identity(n);
    let mut power = m as f64;
    loop {
        g = &g + &h.compose(&iterate)?.scaled(Complex64::new(1.0 / power, 0.0));
        if power >= n as f64 {
            break;
        }
        iterate = ghat.compose(&iterate)?;
        power *= m as f64;
    }
    Ok(g.exp().shift_up(1))
}

pub fn series_chart(germ: LocalGerm, n_terms: usize) -> Result<CoordinateChart> {
    let fv = boettcher_coefficients(&germ, n_terms)?;
    let m = germ.degree();
    let alpha = germ.normalizer();
    let fw = fv.rescaled(alpha);
    let validity = germ.contraction_radius();
    let estimate = fw
        .radius_estimate()
        .min(germ.series(n_terms.max(2))?.radius_estimate());
    let mut radius = validity.min(0.5 * estimate);
    // the last retained terms stand in for the neglected tail
    let tail = |r: f64| {
        let c = fw.coeffs();
        let lead = c.get(1).map_or(0.0, |a| a.norm() * r);
        let last: f64 = (c.len().saturating_sub(4)..c.len()).map(|k| c[k].norm() * r.powi(k as i32)).sum();
        last / lead.max(f64::MIN_POSITIVE)
    };
    while tail(radius) > TAIL_TOLERANCE {
        radius *= 0.9;
        if radius < MIN_DISK {
            return Err(Error::LogBranchFailure(MIN_DISK));
        }
    }
    let zeros = germ.ratio_zeros()?;
    while zeros.iter().any(|z| z.norm() < radius) {
        radius *= 0.5;
        if radius < MIN_DISK {
            return Err(Error::LogBranchFailure(MIN_DISK));
        }
    }
    let center = germ.center();
    let coefficients = fw.coeffs().to_vec();
    let series = Arc::new(fw);
    let germ = Arc::new(germ);
    let evaluator = Arc::new(move |z: SpherePoint| -> Result<Complex64> {
        let w = germ.local(z)?;
        if w.norm() >= radius {
            return Err(outside(z, radius));
        }
        to_sphere_value(center, series.eval(w))
    });
    Ok(CoordinateChart::new(
        center,
        m,
        radius,
        ChartMethod::Series,
        ModelMap::Power { m },
        ChartParams {
            n_max: 0,
            n_terms: Some(n_terms),
            normalizer: alpha,
            ..Default::default()
        },
        Some(coefficients),
        evaluator,
    ))
}
