use serde::Serialize;

use super::{RationalMap, SpherePoint};
use crate::error::Result;

/// Forward orbit `z0, f(z0), ..., f^n(z0)` computed pointwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub start: SpherePoint,
    pub points: Vec<SpherePoint>,
    /// Index of the first point with `|z| > escape_radius` (polynomial maps only).
    pub escaped: Option<usize>,
}

/// Iterate `f` pointwise `n` times (never by symbolic composition).
pub fn iterate_orbit(f: &RationalMap, z0: SpherePoint, n: usize, escape_radius: f64) -> Result<Orbit> {
    let mut points = Vec::with_capacity(n + 1);
    points.push(z0);
    let mut escaped = None;
    let track_escape = f.is_polynomial();
    let mut z = z0;
    for k in 0..=n {
        if k > 0 {
            z = f.eval(z)?;
            points.push(z);
        }
        if track_escape && escaped.is_none() {
            let out = match z {
                SpherePoint::Infinity => true,
                SpherePoint::Finite(w) => w.norm() > escape_radius,
            };
            if out {
                escaped = Some(k);
            }
        }
    }
    Ok(Orbit {
        start: z0,
        points,
        escaped,
    })
}
