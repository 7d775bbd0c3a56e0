use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::maps::{RationalMap, SpherePoint};

/// Spherical-derivative level taken as evidence of non-normality. A
/// heuristic diagnostic, not a proof.
pub const MARTY_THRESHOLD: f64 = 1e3;
pub const TRANSITIVITY_SAMPLES: usize = 10_000;

const RADIAL_STEPS: usize = 20;
const ANGULAR_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Region {
    Disk { center: Complex64, radius: f64 },
    Annulus { center: Complex64, inner: f64, outer: f64 },
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Self {
        Region::Disk { center, radius }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Disk { center, radius } => (z - center).norm() < radius,
            Region::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                inner <= r && r <= outer
            }
        }
    }

    /// Polar grid: concentric circles (boundary included) times
    /// [`ANGULAR_STEPS`] angles.
    pub fn polar_grid(&self) -> Vec<Complex64> {
        let (center, inner, outer) = match *self {
            Region::Disk { center, radius } => (center, 0.0, radius),
            Region::Annulus { center, inner, outer } => (center, inner, outer),
        };
        let mut out = Vec::new();
        for i in 0..=RADIAL_STEPS {
            let r = inner + (outer - inner) * i as f64 / RADIAL_STEPS as f64;
            if r == 0.0 {
                out.push(center);
                continue;
            }
            for j in 0..ANGULAR_STEPS {
                out.push(center + Complex64::from_polar(r, 2.0 * PI * j as f64 / ANGULAR_STEPS as f64));
            }
        }
        out
    }

    /// Square grid clipped to the region, about `count` points.
    pub fn square_grid(&self, count: usize) -> Vec<Complex64> {
        let (center, outer) = match *self {
            Region::Disk { center, radius } => (center, radius),
            Region::Annulus { center, outer, .. } => (center, outer),
        };
        let side = ((count as f64) * 4.0 / PI).sqrt().ceil() as usize;
        let side = side.max(2);
        let mut out = Vec::with_capacity(count);
        for i in 0..side {
            for j in 0..side {
                let x = -outer + 2.0 * outer * i as f64 / (side - 1) as f64;
                let y = -outer + 2.0 * outer * j as f64 / (side - 1) as f64;
                let z = center + Complex64::new(x, y);
                let inside = match self {
                    Region::Disk { .. } => (z - center).norm() <= outer,
                    Region::Annulus { .. } => self.contains(z),
                };
                if inside {
                    out.push(z);
                }
            }
        }
        out
    }
}

/// For `n = 1..=n_max`, the largest `|f_n'(z)| / (1 + |f_n(z)|²)` over a
/// polar sample grid of `region`, accumulated by the chain rule along each
/// orbit in the spherical metric so that poles and infinity are harmless.
pub fn marty_diagnostic(f: &RationalMap, region: Region, n_max: usize) -> Result<Vec<f64>> {
    let charted = f.charted();
    let mut maxima = vec![0.0f64; n_max];
    for z0 in region.polar_grid() {
        let mut z = SpherePoint::Finite(z0);
        // product of spherical derivatives = |f_n'| (1+|z0|²)/(1+|f_n|²)
        let mut product = 1.0 / (1.0 + z0.norm_sqr());
        for slot in maxima.iter_mut() {
            let (image, factor) = charted.spherical_step(z)?;
            product *= factor;
            z = image;
            *slot = slot.max(product);
        }
    }
    Ok(maxima)
}

/// Whether a Marty sequence crosses [`MARTY_THRESHOLD`].
pub fn flags_non_normality(values: &[f64]) -> bool {
    values.iter().any(|&v| v > MARTY_THRESHOLD)
}

/// First `n <= max_n` for which the pushforward of about
/// [`TRANSITIVITY_SAMPLES`] grid points of `u` meets the disk `v`.
pub fn transitivity_probe(f: &RationalMap, u: Region, v: Region, max_n: usize) -> Result<Option<usize>> {
    let mut points: Vec<SpherePoint> = u.square_grid(TRANSITIVITY_SAMPLES).into_iter().map(SpherePoint::Finite).collect();
    for n in 0..=max_n {
        if points.iter().any(|p| p.finite().is_some_and(|z| v.contains(z))) {
            return Ok(Some(n));
        }
        if n < max_n {
            for p in points.iter_mut() {
                *p = f.eval(*p)?;
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> RationalMap {
        RationalMap::poly_desc(&[1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn marty_decays_inside_unit_disk() {
        let m = marty_diagnostic(&square(), Region::disk(Complex64::new(0.0, 0.0), 0.5), 10).unwrap();
        assert!(m.windows(2).all(|w| w[1] <= w[0]));
        assert!(m[9] < 1e-6);
    }

    #[test]
    fn marty_doubles_on_unit_circle() {
        let annulus = Region::Annulus {
            center: Complex64::new(0.0, 0.0),
            inner: 0.9,
            outer: 1.1,
        };
        let m = marty_diagnostic(&square(), annulus, 12).unwrap();
        // on |z| = 1 the value is 2^n / 2; the maximum sits just inside
        for (k, v) in m.iter().enumerate().skip(3) {
            let ratio = v / 2f64.powi(k as i32);
            assert!((1.0..1.1).contains(&ratio), "n = {}: ratio {ratio}", k + 1);
        }
        assert!(flags_non_normality(&m));
    }

    #[test]
    fn transitivity_for_squaring() {
        let u = Region::disk(Complex64::from_polar(1.0, 0.05), 0.01);
        let v = Region::disk(Complex64::from_polar(1.0, 3.0), 0.01);
        let n = transitivity_probe(&square(), u, v, 20).unwrap();
        assert!(n.is_some_and(|n| n <= 20));
        let u = Region::disk(Complex64::new(0.3, 0.0), 0.1);
        let v = Region::disk(Complex64::new(5.0, 0.0), 0.1);
        assert_eq!(transitivity_probe(&square(), u, v, 20).unwrap(), None);
    }

    #[test]
    fn square_grid_size() {
        let g = Region::disk(Complex64::new(1.0, 1.0), 0.1).square_grid(TRANSITIVITY_SAMPLES);
        assert!(g.len() >= 9_000 && g.len() <= 11_000);
    }
}
