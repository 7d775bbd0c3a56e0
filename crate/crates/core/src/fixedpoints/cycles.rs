use num_complex::Complex64;
use serde::Serialize;

use super::classify::{classify, MultiplierClass};
use super::roots::clustered_roots;
use crate::error::{Error, Result};
use crate::maps::{ChartedMap, Polynomial, RationalMap, SpherePoint};

/// Chordal distance below which two periodic points are the same point.
pub const GROUPING_DISTANCE: f64 = 1e-7;
/// Maximum chordal residual `d(f(p_k), p_{k+1})` accepted for a cycle.
pub const CYCLE_RESIDUAL: f64 = 1e-8;
pub const MAX_PERIOD_DEFAULT: usize = 3;

const POLISH_STEPS: usize = 6;

/// A periodic orbit with its exact period and multiplier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cycle {
    pub points: Vec<SpherePoint>,
    pub period: usize,
    pub multiplier: Complex64,
    pub class: MultiplierClass,
    /// Multiplicity of the cycle points as roots of the period equation
    /// (greater than 1 for parabolic cycles).
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonRepellingReport {
    pub count: usize,
    pub bound: usize,
    pub within_bound: bool,
    pub max_period: usize,
    pub cycles: Vec<Cycle>,
}

/// A periodic point candidate: the root value and its multiplicity.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    point: SpherePoint,
    multiplicity: usize,
}

/// Fixed points on the sphere with multiplicity: roots of `P - zQ`, plus
/// infinity when the conjugate `1/f(1/w)` fixes 0.
pub fn fixed_points(f: &RationalMap) -> Result<Vec<SpherePoint>> {
    Ok(fixed_point_candidates(f)?
        .into_iter()
        .flat_map(|c| std::iter::repeat(c.point).take(c.multiplicity))
        .collect())
}

fn fixed_point_polynomial(f: &RationalMap) -> Polynomial {
    f.num() - &(&Polynomial::z() * f.den())
}

fn fixed_point_candidates(f: &RationalMap) -> Result<Vec<Candidate>> {
    let d = f.degree();
    let h = fixed_point_polynomial(f).trimmed(1e-14);
    if h.is_zero() {
        return Err(Error::InvalidInput("identity map has no isolated fixed points".into()));
    }
    let mut out = Vec::new();
    if h.degree() >= 1 {
        for root in clustered_roots(&h)? {
            out.push(Candidate {
                point: SpherePoint::Finite(root.value),
                multiplicity: root.multiplicity,
            });
        }
    }
    let at_infinity = (d + 1).saturating_sub(h.degree());
    if at_infinity > 0 {
        out.push(Candidate {
            point: SpherePoint::Infinity,
            multiplicity: at_infinity,
        });
    }
    Ok(out)
}

/// Image of `p` under `f^k` and the derivative of `f^k` from the chart of
/// `p` back into that same chart.
fn return_map(cm: &ChartedMap, p: SpherePoint, k: usize) -> Result<(SpherePoint, Complex64)> {
    let (home, _) = p.chart();
    let mut z = p;
    let mut derivative = Complex64::new(1.0, 0.0);
    for step in 0..k {
        if step + 1 == k {
            derivative *= cm.derivative_in(z, home);
            z = cm.step(z)?.0;
        } else {
            let (image, d) = cm.step(z)?;
            derivative *= d;
            z = image;
        }
    }
    Ok((z, derivative))
}

/// Newton refinement of a simple period-`k` point through pointwise
/// iteration, accepted only while the chordal residual decreases.
fn polish_simple(cm: &ChartedMap, p: SpherePoint, k: usize) -> SpherePoint {
    let (home, _) = p.chart();
    let residual = |q: SpherePoint| -> f64 {
        match return_map(cm, q, k) {
            Ok((image, _)) => image.chordal(&q),
            Err(_) => f64::INFINITY,
        }
    };
    let mut best = p;
    let mut best_res = residual(p);
    for _ in 0..POLISH_STEPS {
        if best_res == 0.0 {
            break;
        }
        let Some(u) = best.coord_in(home) else { break };
        let Ok((image, d)) = return_map(cm, best, k) else { break };
        let Some(v) = image.coord_in(home) else { break };
        let next_u = u - (v - u) / (d - 1.0);
        if !(next_u.re.is_finite() && next_u.im.is_finite()) {
            break;
        }
        let next = home.to_point(next_u);
        let next_res = residual(next);
        if next_res < best_res {
            best = next;
            best_res = next_res;
        } else {
            break;
        }
    }
    best
}

/// Multiplier of a cycle: the product of chart derivatives of `f` along
/// the points, each step taken into the chart of the next point.
pub fn multiplier(f: &RationalMap, points: &[SpherePoint]) -> Result<Complex64> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty cycle".into()));
    }
    let cm = f.charted();
    let n = points.len();
    let mut lambda = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let next = points[(k + 1) % n];
        let image = f.eval(points[k])?;
        let res = image.chordal(&next);
        if res > CYCLE_RESIDUAL {
            return Err(Error::CycleResidual(res));
        }
        lambda *= cm.derivative_in(points[k], next.chart().0);
    }
    Ok(lambda)
}

fn nearest(candidates: &[Candidate], taken: &[bool], z: SpherePoint) -> Option<(usize, f64)> {
    candidates
        .iter()
        .enumerate()
        .filter(|(i, _)| !taken[*i])
        .map(|(i, c)| (i, c.point.chordal(&z)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// All cycles of exact period `k <= n`, each with multiplier and class.
///
/// Period-`k` points are the fixed points of the symbolic iterate `f^k`,
/// so the cycle search is limited by the symbolic degree cap (`d^n <= 64`).
/// Points already found for a proper divisor of `k` are discarded, the
/// rest are grouped into orbits by pointwise iteration.
pub fn periodic_cycles(f: &RationalMap, n: usize) -> Result<Vec<Cycle>> {
    if n == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let cm = f.charted();
    let mut by_period: Vec<Vec<Candidate>> = Vec::with_capacity(n);
    let mut cycles = Vec::new();
    let mut fk = f.clone();
    for k in 1..=n {
        if k > 1 {
            fk = f.compose(&fk)?;
        }
        let all = fixed_point_candidates(&fk)?;
        by_period.push(all.clone());
        let fresh: Vec<Candidate> = all
            .into_iter()
            .filter(|c| {
                !(1..k)
                    .filter(|j| k % j == 0)
                    .any(|j| by_period[j - 1].iter().any(|o| o.point.chordal(&c.point) < GROUPING_DISTANCE))
            })
            .collect();
        let mut taken = vec![false; fresh.len()];
        for start in 0..fresh.len() {
            if taken[start] {
                continue;
            }
            taken[start] = true;
            let multiplicity = fresh[start].multiplicity;
            let polish = |p: SpherePoint| if multiplicity == 1 { polish_simple(&cm, p, k) } else { p };
            let mut points = vec![polish(fresh[start].point)];
            let mut z = points[0];
            for _ in 1..k {
                z = f.eval(z)?;
                match nearest(&fresh, &taken, z) {
                    Some((i, dist)) if dist < GROUPING_DISTANCE.max(1e3 * CYCLE_RESIDUAL) => {
                        taken[i] = true;
                        points.push(polish(fresh[i].point));
                    }
                    _ => points.push(polish(z)),
                }
            }
            let lambda = multiplier(f, &points)?;
            let first = (0..k)
                .min_by(|&a, &b| points[a].sort_key().partial_cmp(&points[b].sort_key()).unwrap())
                .unwrap_or(0);
            points.rotate_left(first);
            cycles.push(Cycle {
                points,
                period: k,
                multiplier: lambda,
                class: classify(lambda),
                multiplicity,
            });
        }
    }
    cycles.sort_by(|a, b| {
        a.period
            .cmp(&b.period)
            .then(a.points[0].sort_key().partial_cmp(&b.points[0].sort_key()).unwrap())
    });
    Ok(cycles)
}

/// Count non-repelling cycles of period at most `max_period` against the
/// bound `2d - 2`. Periods above `max_period` are not examined.
pub fn nonrepelling_count(f: &RationalMap, max_period: usize) -> Result<NonRepellingReport> {
    let cycles = periodic_cycles(f, max_period)?;
    let count = cycles.iter().filter(|c| !c.class.is_repelling()).count();
    let bound = 2 * f.degree() - 2;
    Ok(NonRepellingReport {
        count,
        bound,
        within_bound: count <= bound,
        max_period,
        cycles,
    })
}
