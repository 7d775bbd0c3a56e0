//! Simultaneous polynomial root finding (Aberth–Ehrlich iteration).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::Polynomial;

/// Backward-error target every returned root must meet.
pub const ROOT_RESIDUAL: f64 = 1e-10;
/// Roots closer than this collapse to their centroid.
pub const CLUSTER_DISTANCE: f64 = 1e-6;

const MAX_ITERATIONS: usize = 800;

/// Root together with its multiplicity after cluster detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// All roots of `p` with multiplicity, sorted lexicographically by (re, im).
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Complex64>> {
    Ok(clustered_roots(p)?
        .into_iter()
        .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
        .collect())
}

/// Distinct roots with multiplicities (clusters closer than
/// [`CLUSTER_DISTANCE`] replaced by their centroid).
pub fn clustered_roots(p: &Polynomial) -> Result<Vec<Root>> {
    if p.degree() == 0 {
        return Err(Error::InvalidInput("polynomial must have degree >= 1".into()));
    }
    if !p.is_finite() {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    let zeros_at_origin = p.low_order();
    let reduced = p.shift_down(zeros_at_origin);
    let mut raw = aberth(&reduced)?;
    raw.extend(std::iter::repeat(Complex64::new(0.0, 0.0)).take(zeros_at_origin));

    let mut clusters = cluster(&raw);
    for c in clusters.iter_mut().filter(|c| c.multiplicity > 1) {
        c.value = polish_multiple(p, c.value, c.multiplicity);
    }
    clusters.sort_by(|a, b| {
        a.value
            .re
            .total_cmp(&b.value.re)
            .then(a.value.im.total_cmp(&b.value.im))
    });

    let residuals: Vec<f64> = clusters.iter().map(|r| p.backward_error(r.value)).collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > ROOT_RESIDUAL {
        return Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            worst,
            residuals,
        });
    }
    Ok(clusters)
}

/// `p(z)/p'(z)`, evaluated through the reversed polynomial for `|z| > 1`.
fn newton_ratio(p: &Polynomial, rev: &Polynomial, z: Complex64) -> Complex64 {
    let n = p.degree() as f64;
    if z.norm_sqr() <= 1.0 {
        let (v, d) = p.eval_with_derivative(z);
        v / d
    } else {
        // p(z) = z^n r(1/z),  p'/p = n/z - r'(w) w^2 / r(w)
        let w = z.inv();
        let (v, d) = rev.eval_with_derivative(w);
        let logderiv = n * w - d * w * w / v;
        logderiv.inv()
    }
}

/// Starting points on circles read off the Newton polygon of `p`.
fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree();
    let pts: Vec<(usize, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| (k, c.norm().ln()))
        .collect();
    // upper convex hull
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut guesses = Vec::with_capacity(n);
    let sigma = 0.7;
    for (seg, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let count = j - i;
        let radius = ((li - lj) / count as f64).exp();
        for k in 0..count {
            let angle = 2.0 * PI * k as f64 / count as f64 + 2.0 * PI * seg as f64 / n as f64 + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-p.coeff(0) / p.coeff(1)]);
    }
    let rev = p.reversed(n);
    let mut z = initial_guesses(p);
    let mut done = vec![false; n];
    let eps = f64::EPSILON;
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let ratio = newton_ratio(p, &rev, z[k]);
            if !ratio.re.is_finite() || !ratio.im.is_finite() {
                // landed on a critical point of p; nudge
                z[k] *= Complex64::new(1.0 + 1e-7, 1e-7);
                all_done = false;
                continue;
            }
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm_sqr() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            let step = if step.re.is_finite() && step.im.is_finite() { step } else { ratio };
            z[k] -= step;
            if step.norm() <= 4.0 * eps * z[k].norm() || p.backward_error(z[k]) <= 2.0 * eps {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    // a few Newton polishing steps, accepted only when they improve the residual
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let ratio = newton_ratio(p, &rev, *zk);
            let candidate = *zk - ratio;
            if candidate.re.is_finite()
                && candidate.im.is_finite()
                && p.backward_error(candidate) < p.backward_error(*zk)
            {
                *zk = candidate;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// A root of multiplicity `m` is a simple root of the `(m-1)`-th
/// derivative, where Newton's method converges quadratically again.
fn polish_multiple(p: &Polynomial, z0: Complex64, m: usize) -> Complex64 {
    let mut g = p.clone();
    for _ in 1..m {
        g = g.derivative();
    }
    let mut z = z0;
    for _ in 0..20 {
        let (v, dv) = g.eval_with_derivative(z);
        if dv.norm_sqr() == 0.0 {
            break;
        }
        let step = v / dv;
        // a large jump means the cluster was not a genuine multiple root
        if !(step.re.is_finite() && step.im.is_finite()) || step.norm() > CLUSTER_DISTANCE * z.norm().max(1.0) {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Group roots whose mutual distance is below [`CLUSTER_DISTANCE`]
/// (scaled by `max(1, |z|)`) and replace each group by its centroid.
fn cluster(roots: &[Complex64]) -> Vec<Root> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() < CLUSTER_DISTANCE * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += roots[i];
                g.2 += 1;
            }
            None => groups.push((r, roots[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, count)| Root {
            value: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}
