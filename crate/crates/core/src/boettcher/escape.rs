use crate::error::{Error, Result};
use crate::maps::{RationalMap, SpherePoint};

/// Orbits are followed until `|z|` exceeds this, where `log|z|` and the
/// potential differ by far less than double precision.
pub const ESCAPE_HORIZON: f64 = 1e100;
pub const ESCAPE_N_MAX_DEFAULT: usize = 1000;

/// Escape rate `lim log⁺|f_n(z)| / m^n` of a polynomial of degree `m`.
///
/// Once `|z_n|` is past the horizon the limit is read off as
/// `(log|z_n| + log|a|/(m-1)) / m^n`. Orbits that do not reach the horizon
/// within `n_max` steps are reported as bounded (0).
pub fn escape_rate(f: &RationalMap, z: SpherePoint, n_max: usize) -> Result<f64> {
    let p = f
        .as_polynomial()
        .ok_or_else(|| Error::InvalidInput("escape rate needs a polynomial map".into()))?;
    let m = p.degree();
    if m < 2 {
        return Err(Error::InvalidInput("polynomial degree must be at least 2".into()));
    }
    let Some(mut zn) = z.finite() else {
        return Ok(f64::INFINITY);
    };
    let log_lead = p.leading().norm().ln() / (m - 1) as f64;
    let mut power = 1.0;
    for _ in 0..=n_max {
        let r = zn.norm();
        if r > ESCAPE_HORIZON {
            return Ok(((r.ln() + log_lead) / power).max(0.0));
        }
        let next = p.eval(zn);
        if !(next.re.is_finite() && next.im.is_finite()) {
            // overflow before the horizon: one more step in logarithmic form
            return Ok(((p.leading().norm().ln() + m as f64 * r.ln() + log_lead) / (power * m as f64)).max(0.0));
        }
        zn = next;
        power *= m as f64;
    }
    Ok(0.0)
}
