use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::{Polynomial, RationalMap, SpherePoint};
use crate::series::PowerSeries;

/// Coefficients below this fraction of the numerator scale are rounding noise.
const VANISHING: f64 = 1e-12;
/// Fixed-point residual accepted when moving the center to 0.
const FIXED_RESIDUAL: f64 = 1e-10;
const VALIDITY_SAMPLES: usize = 256;
const VALIDITY_BISECTIONS: usize = 40;
const VALIDITY_ORBIT: usize = 200;

#[derive(Debug, Clone)]
enum Kind {
    Rational { num: Polynomial, den: Polynomial },
    Series(PowerSeries),
}

/// A map near one of its fixed points, written in the local coordinate
/// `w = z - x` (or `w = 1/z` at infinity) as `g(w) = a w^m (1 + O(w))`.
#[derive(Debug, Clone)]
pub struct LocalGerm {
    center: SpherePoint,
    kind: Kind,
    degree: usize,
    leading: Complex64,
}

impl LocalGerm {
    /// Move the fixed point `x` of `f` to the origin.
    pub fn at(f: &RationalMap, x: SpherePoint) -> Result<Self> {
        let (num, den) = match x {
            SpherePoint::Infinity => {
                let d = f.degree();
                (f.den().reversed(d), f.num().reversed(d))
            }
            SpherePoint::Finite(x0) => {
                let p = f.num().shifted(x0);
                let q = f.den().shifted(x0);
                (&p - &q.scaled(x0), q)
            }
        };
        let d0 = den.coeff(0);
        let scale = num.scale().max(den.scale());
        if d0.norm() <= VANISHING * scale {
            return Err(Error::NotFixed(f64::INFINITY));
        }
        let residual = num.coeff(0).norm() / d0.norm();
        if residual > FIXED_RESIDUAL {
            return Err(Error::NotFixed(residual));
        }
        let limit = VANISHING * num.scale().max(d0.norm());
        let degree = num
            .coeffs()
            .iter()
            .position(|c| c.norm() > limit)
            .ok_or_else(|| Error::InvalidInput("map is constant near the fixed point".into()))?;
        let mut coeffs = num.coeffs().to_vec();
        for c in coeffs.iter_mut().take(degree) {
            *c = Complex64::new(0.0, 0.0);
        }
        let num = Polynomial::new(coeffs);
        let leading = num.coeff(degree) / d0;
        Ok(Self {
            center: x,
            kind: Kind::Rational { num, den },
            degree,
            leading,
        })
    }

    /// A germ given directly by its Taylor series at 0 (`s(0) = 0`).
    pub fn from_series(s: PowerSeries) -> Result<Self> {
        if s.coeff(0).norm() > FIXED_RESIDUAL {
            return Err(Error::NotFixed(s.coeff(0).norm()));
        }
        let scale = s.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let degree = s
            .coeffs()
            .iter()
            .position(|c| c.norm() > VANISHING * scale)
            .ok_or_else(|| Error::InvalidInput("zero series".into()))?;
        let mut coeffs = s.coeffs().to_vec();
        for c in coeffs.iter_mut().take(degree) {
            *c = Complex64::new(0.0, 0.0);
        }
        let leading = coeffs[degree];
        let n = coeffs.len();
        Ok(Self {
            center: SpherePoint::Finite(Complex64::new(0.0, 0.0)),
            kind: Kind::Series(PowerSeries::new(coeffs, n)),
            degree,
            leading,
        })
    }

    pub fn center(&self) -> SpherePoint {
        self.center
    }

    /// Local degree `m` (1 at a non-critical fixed point).
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Leading coefficient `a`; the multiplier when `m = 1`.
    pub fn leading(&self) -> Complex64 {
        self.leading
    }

    /// Principal `α` with `α^(m-1) = a`; `v = αw` makes the germ monic.
    pub fn normalizer(&self) -> Complex64 {
        if self.degree < 2 {
            return Complex64::new(1.0, 0.0);
        }
        (self.leading.ln() / (self.degree - 1) as f64).exp()
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        match &self.kind {
            Kind::Rational { num, den } => num.eval(w) / den.eval(w),
            Kind::Series(s) => s.eval(w),
        }
    }

    /// `g(w)` and `g'(w)`.
    pub fn eval_with_derivative(&self, w: Complex64) -> (Complex64, Complex64) {
        match &self.kind {
            Kind::Rational { num, den } => {
                let (p, dp) = num.eval_with_derivative(w);
                let (q, dq) = den.eval_with_derivative(w);
                (p / q, (dp * q - p * dq) / (q * q))
            }
            Kind::Series(s) => (s.eval(w), s.derivative().eval(w)),
        }
    }

    /// `g(w) / (a w^m)`, which tends to 1 at the origin. Computed without
    /// forming `w^m`, so it stays accurate for tiny `w`.
    pub fn ratio(&self, w: Complex64) -> Complex64 {
        let m = self.degree;
        match &self.kind {
            Kind::Rational { num, den } => num.shift_down(m).eval(w) / (den.eval(w) * self.leading),
            Kind::Series(s) => s.shift_down(m).eval(w) / self.leading,
        }
    }

    /// Local coordinate of a point of the sphere.
    pub fn local(&self, z: SpherePoint) -> Result<Complex64> {
        match (self.center, z) {
            (SpherePoint::Finite(x), SpherePoint::Finite(z)) => Ok(z - x),
            (SpherePoint::Infinity, SpherePoint::Infinity) => Ok(Complex64::new(0.0, 0.0)),
            (SpherePoint::Infinity, SpherePoint::Finite(z)) if z.norm_sqr() > 0.0 => Ok(z.inv()),
            _ => Err(Error::OutsideValidity(format!("{z} is far from the center {}", self.center))),
        }
    }

    /// Taylor series of `g` with `len` terms.
    pub fn series(&self, len: usize) -> Result<PowerSeries> {
        match &self.kind {
            Kind::Rational { num, den } => {
                let n = PowerSeries::from_polynomial(num, len);
                let d = PowerSeries::from_polynomial(den, len);
                Ok(&n * &d.inv()?)
            }
            Kind::Series(s) => Ok(s.truncated(len)),
        }
    }

    /// Zeros of `g(w)/w^m` (only available for rational germs).
    pub fn ratio_zeros(&self) -> Result<Vec<Complex64>> {
        match &self.kind {
            Kind::Rational { num, .. } => {
                let q = num.shift_down(self.degree);
                if q.degree() == 0 {
                    Ok(Vec::new())
                } else {
                    crate::fixedpoints::poly_roots(&q)
                }
            }
            Kind::Series(_) => Ok(Vec::new()),
        }
    }

    /// Whether the orbit of `w` stays in the contraction region
    /// `|g(w)| <= 2|a||w|^m` and decreases monotonically to 0.
    pub fn contracts(&self, w: Complex64) -> bool {
        let mut w = w;
        for _ in 0..VALIDITY_ORBIT {
            let r = w.norm();
            if r < 1e-150 {
                return true;
            }
            let q = self.ratio(w);
            let next = self.eval(w);
            if !(q.norm() <= 2.0) || !(next.norm() < r) {
                return false;
            }
            w = next;
        }
        true
    }

    /// Largest `r` (up to `upper`) for which `ok` holds on the circle
    /// `|w| = r`, by bisection.
    pub fn largest_radius(&self, upper: f64, ok: impl Fn(Complex64) -> bool) -> f64 {
        let circle = |r: f64| {
            (0..VALIDITY_SAMPLES).all(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / VALIDITY_SAMPLES as f64;
                ok(Complex64::from_polar(r, theta))
            })
        };
        let top = upper * (1.0 - 1e-9);
        if circle(top) {
            return top;
        }
        let (mut lo, mut hi) = (0.0, upper);
        for _ in 0..VALIDITY_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if circle(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Largest `r` such that the orbits of samples on `|w| = r` stay in the
    /// contraction region (bisection over `(0, |a|^(-1/(m-1)))`).
    pub fn contraction_radius(&self) -> f64 {
        if self.degree < 2 {
            return 0.0;
        }
        let upper = self.leading.norm().powf(-1.0 / (self.degree - 1) as f64);
        self.largest_radius(upper, |w| self.contracts(w))
    }
}
