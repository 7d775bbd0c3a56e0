//! Points of the Riemann sphere and the chordal metric.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeTuple, Serializer};

/// Finite complex value. Components are expected to be finite; the point at
/// infinity is represented by [`SpherePoint::Infinity`].
pub type ComplexNumber = Complex64;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self::from_complex(Complex64::new(re, im))
    }

    /// Non-finite inputs collapse to infinity.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    /// `1/z` on the sphere, swapping 0 and infinity.
    pub fn reciprocal(&self) -> Self {
        match *self {
            SpherePoint::Infinity => SpherePoint::Finite(Complex64::new(0.0, 0.0)),
            SpherePoint::Finite(z) if z.norm_sqr() == 0.0 => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::from_complex(z.inv()),
        }
    }

    /// Chordal distance under the stereographic embedding, in `[0, 2]`.
    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        match (*self, *other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
                // Compare through the chart with the smaller coordinate so that
                // large moduli do not overflow.
                if z.norm_sqr() > 1.0 && w.norm_sqr() > 1.0 {
                    let (a, b) = (z.inv(), w.inv());
                    2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
                } else {
                    2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
                }
            }
        }
        .min(2.0)
    }

    /// Chart coordinate: `z` when `|z| <= 1`, otherwise `1/z` (infinity maps to 0).
    pub fn chart(&self) -> (Chart, Complex64) {
        match *self {
            SpherePoint::Infinity => (Chart::Inverted, Complex64::new(0.0, 0.0)),
            SpherePoint::Finite(z) if z.norm_sqr() <= 1.0 => (Chart::Plane, z),
            SpherePoint::Finite(z) => (Chart::Inverted, z.inv()),
        }
    }

    /// Coordinate of this point in a given chart, `None` when the point is
    /// the chart's excluded pole.
    pub fn coord_in(&self, chart: Chart) -> Option<Complex64> {
        match (chart, *self) {
            (Chart::Plane, SpherePoint::Finite(z)) => Some(z),
            (Chart::Plane, SpherePoint::Infinity) => None,
            (Chart::Inverted, SpherePoint::Infinity) => Some(Complex64::new(0.0, 0.0)),
            (Chart::Inverted, SpherePoint::Finite(z)) if z.norm_sqr() == 0.0 => None,
            (Chart::Inverted, SpherePoint::Finite(z)) => Some(z.inv()),
        }
    }

    /// Lexicographic ordering key (re, im); infinity sorts last.
    pub fn sort_key(&self) -> (u8, f64, f64) {
        match *self {
            SpherePoint::Finite(z) => (0, z.re, z.im),
            SpherePoint::Infinity => (1, 0.0, 0.0),
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

impl From<f64> for SpherePoint {
    fn from(x: f64) -> Self {
        SpherePoint::new(x, 0.0)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}", format_complex(*z)),
            SpherePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Serialized as `[re, im]` or the string `"inf"`.
impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Finite(z) => {
                let mut t = s.serialize_tuple(2)?;
                t.serialize_element(&z.re)?;
                t.serialize_element(&z.im)?;
                t.end()
            }
            SpherePoint::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Which coordinate a [`SpherePoint`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `u = z`
    Plane,
    /// `u = 1/z`
    Inverted,
}

impl Chart {
    pub fn to_point(self, u: Complex64) -> SpherePoint {
        match self {
            Chart::Plane => SpherePoint::from_complex(u),
            Chart::Inverted => SpherePoint::Finite(u).reciprocal(),
        }
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}-{}i", z.re, -z.im)
    }
}

/// `exp(z) - 1` without cancellation for small `z`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let half_sin = (b / 2.0).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * half_sin * half_sin, a.exp() * b.sin())
}

/// Principal `log(1 + u)` without cancellation for small `u`.
pub fn log1p(u: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * u.re + u.norm_sqr()).ln_1p();
    let im = u.im.atan2(1.0 + u.re);
    Complex64::new(re, im)
}

/// Among the `n`-th roots of `z`, the one closest to `previous`.
///
/// Returns `None` when two roots are equidistant from `previous` within
/// `ambiguity` radians of argument.
pub fn nearest_root(z: Complex64, n: f64, previous: Complex64, ambiguity: f64) -> Option<Complex64> {
    if z.norm_sqr() == 0.0 {
        return Some(Complex64::new(0.0, 0.0));
    }
    if n == 1.0 {
        return Some(z);
    }
    let modulus = (z.norm().ln() / n).exp();
    let theta = z.arg();
    let psi = previous.arg();
    // offset of the chosen branch from psi, measured before division by n
    let mut delta = (theta - psi * n).rem_euclid(2.0 * PI);
    if delta > PI {
        delta -= 2.0 * PI;
    }
    if (PI - delta.abs()) < ambiguity {
        return None;
    }
    Some(Complex64::from_polar(modulus, psi + delta / n))
}

/// Best rational approximation of `x` in `[0, 1)` via continued fractions.
///
/// Walks at most `depth` convergents and returns the first `(p, q)` with
/// `|x - p/q| < tol`.
pub fn rational_approximation(x: f64, depth: usize, tol: f64) -> Option<(i64, u64)> {
    let x = x.rem_euclid(1.0);
    if x < tol {
        return Some((0, 1));
    }
    if 1.0 - x < tol {
        return Some((1, 1));
    }
    let (mut h_prev, mut h) = (1i128, 0i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut rem = x;
    for _ in 0..depth {
        if rem.abs() < f64::EPSILON {
            break;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        if a > 1e12 {
            break;
        }
        rem = inv - a;
        let a = a as i128;
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        if (x - h as f64 / k as f64).abs() < tol {
            return Some((h as i64, k as u64));
        }
    }
    None
}
