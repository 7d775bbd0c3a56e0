use std::sync::Arc;

use num_complex::Complex64;

use super::chart::{outside, ChartMethod, ChartParams, CoordinateChart, ModelMap};
use super::germ::LocalGerm;
use crate::error::{Error, Result};
use crate::maps::{nearest_root, RationalMap, SpherePoint};

/// Relative change between successive approximations that ends the iteration.
pub const STEP_TOLERANCE: f64 = 1e-12;
/// Two candidate roots closer than this (in argument) make the branch ambiguous.
pub const BRANCH_AMBIGUITY: f64 = 1e-13;
pub const N_MAX_DEFAULT: usize = 200;

/// Orbit points below this modulus contribute factors equal to 1 in double
/// precision.
pub(crate) const NEGLIGIBLE: f64 = 1e-150;

/// Ritt's construction `F = lim (f_p)^(1/m^p)` in the normalized coordinate
/// `v = αw`, with each root chosen nearest to the previous approximation.
pub fn boettcher_ritt(f: &RationalMap, x: SpherePoint, n_max: usize) -> Result<CoordinateChart> {
    ritt_chart(LocalGerm::at(f, x)?, n_max)
}

pub fn ritt_chart(germ: LocalGerm, n_max: usize) -> Result<CoordinateChart> {
    require_superattracting(&germ)?;
    let radius = germ.contraction_radius();
    let m = germ.degree();
    let alpha = germ.normalizer();
    let center = germ.center();
    let germ = Arc::new(germ);
    let evaluator = Arc::new(move |z: SpherePoint| -> Result<Complex64> {
        let w = germ.local(z)?;
        if w.norm() >= radius {
            return Err(outside(z, radius));
        }
        let v = ritt_value(&germ, w, n_max)?;
        to_sphere_value(center, v)
    });
    Ok(CoordinateChart::new(
        center,
        m,
        radius,
        ChartMethod::Ritt,
        ModelMap::Power { m },
        ChartParams {
            n_max,
            normalizer: alpha,
            ..Default::default()
        },
        None,
        evaluator,
    ))
}

pub(crate) fn require_superattracting(germ: &LocalGerm) -> Result<()> {
    if germ.degree() < 2 {
        return Err(Error::WrongFixedPointType {
            modulus: germ.leading().norm(),
            expected: "superattracting",
        });
    }
    Ok(())
}

/// The chart value at a finite center is `F(w)`; at infinity it is
/// `1/F(1/z)`, the coordinate conjugating `f` to `z^m` near infinity.
pub(crate) fn to_sphere_value(center: SpherePoint, v: Complex64) -> Result<Complex64> {
    match center {
        SpherePoint::Finite(_) => Ok(v),
        SpherePoint::Infinity if v.norm_sqr() == 0.0 => {
            Err(Error::InvalidInput("the chart at infinity is infinite at its center".into()))
        }
        SpherePoint::Infinity => Ok(v.inv()),
    }
}

pub(crate) fn ritt_value(germ: &LocalGerm, w: Complex64, n_max: usize) -> Result<Complex64> {
    let m = germ.degree() as f64;
    let mut y = germ.normalizer() * w;
    let mut wk = w;
    let mut power = 1.0;
    for p in 1..=n_max {
        if wk.norm() < NEGLIGIBLE {
            return Ok(y);
        }
        power *= m;
        let q = germ.ratio(wk);
        let next = germ.eval(wk);
        if !(q.norm() <= 2.0) || !(next.norm() < wk.norm()) {
            return Err(Error::OutsideValidity(format!(
                "orbit left the contraction region at step {p}"
            )));
        }
        let root = nearest_root(q, power, Complex64::new(1.0, 0.0), BRANCH_AMBIGUITY)
            .ok_or(Error::DegenerateBranch { step: p })?;
        let previous = y;
        y *= root;
        if (y - previous).norm() < STEP_TOLERANCE * y.norm() {
            return Ok(y);
        }
        wk = next;
    }
    Ok(y)
}
