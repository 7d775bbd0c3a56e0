//! Truncated power series `Σ c_k w^k`, `k < len`, with composition,
//! reversion and the elementary functions needed by the chart constructions.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::{Polynomial, RationalMap};

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl PowerSeries {
    /// Series with the given coefficients truncated or padded to `len` terms.
    pub fn new(mut coeffs: Vec<Complex64>, len: usize) -> Self {
        coeffs.resize(len, zero());
        Self { coeffs }
    }

    pub fn zero(len: usize) -> Self {
        Self::new(Vec::new(), len)
    }

    pub fn constant(c: Complex64, len: usize) -> Self {
        Self::new(vec![c], len)
    }

    /// The identity series `w`.
    pub fn identity(len: usize) -> Self {
        Self::new(vec![zero(), Complex64::new(1.0, 0.0)], len)
    }

    pub fn from_polynomial(p: &Polynomial, len: usize) -> Self {
        Self::new(p.coeffs().to_vec(), len)
    }

    /// Taylor expansion of `P/Q` at 0 (requires `Q(0) != 0`).
    pub fn from_rational(f: &RationalMap, len: usize) -> Result<Self> {
        let q = Self::from_polynomial(f.den(), len);
        Ok(&Self::from_polynomial(f.num(), len) * &q.inv()?)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Index of the first nonzero coefficient (`len` for the zero series).
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.norm_sqr() == 0.0).count()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// `f(s w)`
    pub fn rescaled(&self, s: Complex64) -> Self {
        let mut pw = Complex64::new(1.0, 0.0);
        let mut coeffs = Vec::with_capacity(self.len());
        for &c in &self.coeffs {
            coeffs.push(c * pw);
            pw *= s;
        }
        Self { coeffs }
    }

    /// Divide by `w^k`, shortening the series by `k` terms.
    pub fn shift_down(&self, k: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().skip(k).copied().collect(),
        }
    }

    /// Multiply by `w^k`, keeping the length.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![zero(); k.min(self.len())];
        coeffs.extend(self.coeffs.iter().take(self.len().saturating_sub(k)));
        Self { coeffs }
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self::new(self.coeffs.iter().take(len).copied().collect(), len)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(zero(), |acc, &c| acc * w + c)
    }

    pub fn derivative(&self) -> Self {
        let n = self.len();
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect(),
            n,
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let n = self.len();
        let mut coeffs = vec![zero()];
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Self::new(coeffs, n)
    }

    /// `1/f`, requires `f(0) != 0`.
    pub fn inv(&self) -> Result<Self> {
        let a0 = self.coeff(0);
        if a0.norm_sqr() == 0.0 {
            return Err(Error::InvalidInput("series inverse needs a nonzero constant term".into()));
        }
        let n = self.len();
        let mut out = vec![zero(); n];
        let inv0 = a0.inv();
        for k in 0..n {
            let mut s = if k == 0 { Complex64::new(1.0, 0.0) } else { zero() };
            for j in 1..=k {
                s -= self.coeffs[j] * out[k - j];
            }
            out[k] = s * inv0;
        }
        Ok(Self { coeffs: out })
    }

    /// `f(g(w))` for `g(0) = 0`, by Horner's scheme.
    pub fn compose(&self, g: &PowerSeries) -> Result<Self> {
        if g.coeff(0).norm_sqr() != 0.0 {
            return Err(Error::InvalidInput("inner series must vanish at 0".into()));
        }
        let n = self.len().min(g.len());
        let g = g.truncated(n);
        let mut acc = Self::zero(n);
        for &c in self.coeffs.iter().take(n).rev() {
            acc = &acc * &g;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Principal `log f`, requires `f(0) != 0`.
    pub fn log(&self) -> Result<Self> {
        let a0 = self.coeff(0);
        let q = self.inv()?;
        let mut out = (&self.derivative() * &q).integral();
        out.coeffs[0] = a0.ln();
        Ok(out)
    }

    /// `exp f`
    pub fn exp(&self) -> Self {
        // E' = f' E
        let n = self.len();
        let df = self.derivative();
        let mut e = vec![zero(); n];
        if n == 0 {
            return Self { coeffs: e };
        }
        e[0] = self.coeff(0).exp();
        for k in 1..n {
            let mut s = zero();
            for j in 0..k {
                s += df.coeffs[j] * e[k - 1 - j];
            }
            e[k] = s / k as f64;
        }
        Self { coeffs: e }
    }

    /// `f^e` through the principal logarithm, requires `f(0) != 0`.
    pub fn powc(&self, e: Complex64) -> Result<Self> {
        Ok(self.log()?.scaled(e).exp())
    }

    /// Compositional inverse of `f` with `f(0) = 0`, `f'(0) != 0`.
    pub fn reversion(&self) -> Result<Self> {
        let n = self.len();
        if self.coeff(0).norm_sqr() != 0.0 || self.coeff(1).norm_sqr() == 0.0 {
            return Err(Error::InvalidInput("reversion needs f(0) = 0 and f'(0) != 0".into()));
        }
        // Newton iteration g <- g - (f(g) - w)/f'(g), doubling precision
        let a1 = self.coeff(1);
        let mut g = Self::new(vec![zero(), a1.inv()], n);
        let df = self.derivative();
        let id = Self::identity(n);
        let mut prec = 2;
        while prec < 2 * n.max(2) {
            let fg = self.compose(&g)?;
            let dfg = df.compose(&g)?;
            let correction = &(&fg - &id) * &dfg.inv()?;
            g = &g - &correction;
            prec *= 2;
        }
        Ok(g)
    }

    /// Root-test estimate of the radius of convergence from the upper half
    /// of the available coefficients.
    pub fn radius_estimate(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for k in (n / 2).max(1)..n {
            let c = self.coeffs[k].norm();
            if c > 0.0 {
                worst = worst.max(c.powf(1.0 / k as f64));
            }
        }
        if worst == 0.0 {
            f64::INFINITY
        } else {
            1.0 / worst
        }
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.len().min(rhs.len());
        PowerSeries {
            coeffs: (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.len().min(rhs.len());
        PowerSeries {
            coeffs: (0..n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect(),
        }
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scaled(Complex64::new(-1.0, 0.0))
    }
}

/// Truncated product (length is the shorter of the two).
impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.len().min(rhs.len());
        let mut out = vec![zero(); n];
        let lo = self.valuation().min(n);
        for i in lo..n {
            let a = self.coeffs[i];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..(n - i) {
                out[i + j] += a * rhs.coeffs[j];
            }
        }
        PowerSeries { coeffs: out }
    }
}
