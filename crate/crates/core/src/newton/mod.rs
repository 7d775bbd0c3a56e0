//! Newton's method as a rational map, and Cayley's description of the
//! basins for a quadratic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fixedpoints::{clustered_roots, poly_roots};
use crate::julia::{Cell, RasterGrid, Viewport};
use crate::maps::{MoebiusMap, Polynomial, RationalMap, SpherePoint};

/// Chordal distance to a root that counts as arrival.
pub const NEWTON_TOLERANCE_DEFAULT: f64 = 1e-8;
pub const NEWTON_MAX_ITER_DEFAULT: u32 = 200;
/// Consecutive iterates that must stay within tolerance of the same root.
pub const CONSECUTIVE_HITS: u32 = 3;

/// `N(z) = z - p(z)/p'(z) = (z p' - p) / p'` in reduced form.
pub fn newton_map(p: &Polynomial) -> Result<RationalMap> {
    if p.degree() < 2 {
        return Err(Error::InvalidInput(format!(
            "Newton map needs degree >= 2, got {}",
            p.degree()
        )));
    }
    if let Some(r) = clustered_roots(p)?.into_iter().find(|r| r.multiplicity > 1) {
        return Err(Error::NotSquarefree(crate::maps::format_complex(r.value)));
    }
    let dp = p.derivative();
    let num = &(&Polynomial::z() * &dp) - p;
    RationalMap::new(num, dp)
}

/// Iterate the Newton map from `z0` and report the index of the root the
/// orbit settles on, judged by [`CONSECUTIVE_HITS`] successive iterates
/// within chordal distance `tol`.
pub fn newton_basin(n: &RationalMap, roots: &[Complex64], z0: Complex64, max_iter: u32, tol: f64) -> Option<usize> {
    let mut z = SpherePoint::Finite(z0);
    let mut current: Option<usize> = None;
    let mut hits = 0;
    for _ in 0..max_iter {
        z = n.eval(z).ok()?;
        let near = roots.iter().position(|r| z.chordal(&SpherePoint::Finite(*r)) < tol);
        match near {
            Some(k) if current == Some(k) => hits += 1,
            Some(k) => {
                current = Some(k);
                hits = 1;
            }
            None => {
                current = None;
                hits = 0;
            }
        }
        if hits >= CONSECUTIVE_HITS {
            return current;
        }
    }
    None
}

/// Basin picture for Newton's method on `p`. Roots are labelled in the
/// lexicographic order of [`poly_roots`].
pub fn newton_raster(p: &Polynomial, viewport: Viewport, max_iter: u32, tol: f64) -> Result<RasterGrid> {
    let n = newton_map(p)?;
    let roots = poly_roots(p)?;
    let mut grid = RasterGrid::build(viewport, max_iter, |z| match newton_basin(&n, &roots, z, max_iter, tol) {
        Some(k) => Cell::Basin(k),
        None => Cell::Unresolved,
    });
    grid.tolerance = Some(tol);
    Ok(grid)
}

/// Basins of a quadratic with distinct roots.
pub fn cayley_basins(p: &Polynomial, viewport: Viewport, max_iter: u32, tol: f64) -> Result<RasterGrid> {
    if p.degree() != 2 {
        return Err(Error::InvalidInput(format!(
            "Cayley basins are defined for quadratics, got degree {}",
            p.degree()
        )));
    }
    newton_raster(p, viewport, max_iter, tol)
}

/// Label predicted by the perpendicular-bisector rule: the nearer root, or
/// `None` on the bisector itself.
pub fn bisector_label(roots: &[Complex64; 2], z: Complex64) -> Option<usize> {
    let (d0, d1) = ((z - roots[0]).norm(), (z - roots[1]).norm());
    if d0 < d1 {
        Some(0)
    } else if d1 < d0 {
        Some(1)
    } else {
        None
    }
}

/// Pixels whose label disagrees with the bisector rule, and how many of
/// those lie farther than one pixel from the bisector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CayleyCheck {
    pub disagreements: usize,
    pub outside_band: usize,
}

pub fn cayley_check(grid: &RasterGrid, roots: &[Complex64; 2]) -> CayleyCheck {
    let vp = grid.viewport;
    let h = vp.pixel_size();
    let axis = roots[1] - roots[0];
    let mid = 0.5 * (roots[0] + roots[1]);
    let mut check = CayleyCheck {
        disagreements: 0,
        outside_band: 0,
    };
    for row in 0..vp.rows {
        for col in 0..vp.cols {
            let z = vp.pixel(col, row);
            let expected = bisector_label(roots, z);
            let got = match grid.get(col, row) {
                Cell::Basin(k) => Some(k),
                _ => None,
            };
            if got != expected {
                check.disagreements += 1;
                let distance = ((z - mid) * axis.conj()).re.abs() / axis.norm();
                if distance > h {
                    check.outside_band += 1;
                }
            }
        }
    }
    check
}

/// The Möbius map `h(z) = (z - r1)/(z - r2)` that conjugates the Newton map
/// of a quadratic with roots `r1`, `r2` to `w ↦ w²`.
pub fn cayley_conjugacy(r1: Complex64, r2: Complex64) -> Result<MoebiusMap> {
    let one = Complex64::new(1.0, 0.0);
    MoebiusMap::new(one, -r1, one, -r2)
}
