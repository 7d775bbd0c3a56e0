use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::Polynomial;

/// Coefficientwise residual accepted for a returned iterative root.
pub const ITERATIVE_ROOT_RESIDUAL: f64 = 1e-8;

fn iterate(g: &Polynomial, k: u32) -> Polynomial {
    let mut acc = g.clone();
    for _ in 1..k {
        acc = g.compose(&acc);
    }
    acc
}

/// All polynomials `g` of degree `p` with `g∘…∘g = F` (`k` copies, `p^k = deg F`).
///
/// The leading coefficient solves `a^((p^k - 1)/(p - 1)) = lead(F)`; every
/// branch is tried. The remaining coefficients follow from the top degree
/// down: the coefficient of `z^(n-t)` in the iterate is affine in `c_(p-t)`,
/// so two trial compositions determine it. Candidates are verified by full
/// composition and returned ordered by the argument of their leading
/// coefficient. An empty result means no iterative root exists.
pub fn poly_iter_root(f: &Polynomial, p: usize) -> Result<Vec<Polynomial>> {
    let n = f.degree();
    if p < 2 || n < 2 {
        return Err(Error::InvalidExponent(n, p));
    }
    let mut k = 0u32;
    let mut power = 1usize;
    while power < n {
        power = power.saturating_mul(p);
        k += 1;
    }
    if power != n {
        return Err(Error::InvalidExponent(n, p));
    }
    let e = (n - 1) / (p - 1);
    let lead = f.leading();
    let scale = f.scale().max(1.0);
    let mut found: Vec<(f64, Polynomial)> = Vec::new();
    for j in 0..e {
        let arg = (lead.arg() + 2.0 * PI * j as f64) / e as f64;
        let a = Complex64::from_polar(lead.norm().powf(1.0 / e as f64), arg);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); p + 1];
        coeffs[p] = a;
        let mut consistent = true;
        for t in 1..=p {
            let target = f.coeff(n - t);
            coeffs[p - t] = Complex64::new(0.0, 0.0);
            let v0 = iterate(&Polynomial::new(coeffs.clone()), k).coeff(n - t);
            coeffs[p - t] = Complex64::new(1.0, 0.0);
            let v1 = iterate(&Polynomial::new(coeffs.clone()), k).coeff(n - t);
            let slope = v1 - v0;
            if slope.norm() <= 1e-12 * scale {
                if (target - v0).norm() <= ITERATIVE_ROOT_RESIDUAL * scale {
                    coeffs[p - t] = Complex64::new(0.0, 0.0);
                } else {
                    consistent = false;
                    break;
                }
            } else {
                coeffs[p - t] = (target - v0) / slope;
            }
        }
        if !consistent {
            continue;
        }
        let g = Polynomial::new(coeffs);
        if iterate(&g, k).distance(f) <= ITERATIVE_ROOT_RESIDUAL * scale {
            found.push((arg.rem_euclid(2.0 * PI), g));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(found.into_iter().map(|(_, g)| g).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(desc: &[f64]) -> Polynomial {
        Polynomial::new(desc.iter().rev().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    #[test]
    fn square_root_of_z4() {
        let roots = poly_iter_root(&poly(&[1.0, 0.0, 0.0, 0.0, 0.0]), 2).unwrap();
        assert!(roots.iter().any(|g| g.distance(&poly(&[1.0, 0.0, 0.0])) < 1e-12));
    }

    #[test]
    fn recovers_z2_plus_1() {
        let roots = poly_iter_root(&poly(&[1.0, 0.0, 2.0, 0.0, 2.0]), 2).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].distance(&poly(&[1.0, 0.0, 1.0])) < 1e-10);
    }

    #[test]
    fn z4_plus_1_has_no_root() {
        assert!(poly_iter_root(&poly(&[1.0, 0.0, 0.0, 0.0, 1.0]), 2).unwrap().is_empty());
    }

    #[test]
    fn invalid_exponent() {
        assert_eq!(
            poly_iter_root(&poly(&[1.0, 0.0, 0.0, 0.0]), 2),
            Err(Error::InvalidExponent(3, 2))
        );
    }

    #[test]
    fn triple_iterate_round_trip() {
        let g = Polynomial::new(vec![
            Complex64::new(0.3, -0.1),
            Complex64::new(0.5, 0.2),
            Complex64::new(1.5, 0.5),
        ]);
        let f = iterate(&g, 3);
        let roots = poly_iter_root(&f, 2).unwrap();
        assert!(roots.iter().any(|r| r.distance(&g) < 1e-8));
        for r in &roots {
            assert!(iterate(r, 3).distance(&f) < 1e-8 * f.scale());
        }
    }
}
