//! Möbius transformations: classification by the multiplier ratio at the
//! fixed points and closed-form iteration through the coefficient matrix.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{expm1, log1p, rational_approximation, Polynomial, RationalMap, SpherePoint};
use crate::error::{Error, Result};

/// Continued-fraction depth for deciding whether a rotation angle is rational.
pub const ANGLE_DEPTH: usize = 12;
/// Accept `p/q` when `|x - p/q|` is below this.
pub const ANGLE_TOLERANCE: f64 = 1e-10;
/// `| |κ| - 1 |` below this counts as unit modulus.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-9;

/// `z ↦ (Az + B)/(Cz + D)` with `AD - BC != 0`, scaled so the largest
/// coefficient has modulus 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum MoebiusClass {
    IdentityLike,
    Parabolic,
    EllipticRational { period: u64 },
    EllipticIrrational { rotation: f64 },
    Loxodromic { kappa_modulus: f64 },
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::InvalidInput("Möbius coefficients must be finite and not all zero".into()));
        }
        let m = Self { a, b, c, d }.scaled(1.0 / scale);
        if m.det().norm() < 1e-14 {
            return Err(Error::InvalidInput("AD - BC vanishes".into()));
        }
        Ok(m)
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let r = |x: f64| Complex64::new(x, 0.0);
        Self::new(r(a), r(b), r(c), r(d))
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0).expect("identity is valid")
    }

    /// The elliptic family `((a+bi)z + (c+di)) / ((-c+di)z + (a-bi))`.
    pub fn unitary_family(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(
            Complex64::new(a, b),
            Complex64::new(c, d),
            Complex64::new(-c, d),
            Complex64::new(a, -b),
        )
    }

    fn scaled(self, s: f64) -> Self {
        Self {
            a: self.a * s,
            b: self.b * s,
            c: self.c * s,
            d: self.d * s,
        }
    }

    fn from_matrix_normalized(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        Self { a, b, c, d }.scaled(1.0 / scale)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn eval(&self, z: SpherePoint) -> SpherePoint {
        match z {
            SpherePoint::Infinity => {
                if self.c.norm_sqr() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from_complex(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm_sqr() == 0.0 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::from_complex((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// `self ∘ other` as a matrix product.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        Self::from_matrix_normalized(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    pub fn to_rational(&self) -> RationalMap {
        RationalMap::from_parts_unchecked(
            Polynomial::new(vec![self.b, self.a]),
            Polynomial::new(vec![self.d, self.c]),
        )
    }

    /// Matrix eigenvalues `μ1, μ2` ordered so that `|μ1| >= |μ2|`.
    ///
    /// For a fixed point `r` with eigenvector `(r, 1)` the eigenvalue is
    /// `Cr + D`; for `r = ∞` it is `A`.
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let tr = self.trace();
        let disc = (tr * tr - 4.0 * self.det()).sqrt();
        let (mut m1, mut m2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
        // recompute the smaller one from the determinant to avoid cancellation
        if m1.norm() < m2.norm() {
            std::mem::swap(&mut m1, &mut m2);
        }
        if m1.norm() > 0.0 {
            m2 = self.det() / m1;
        }
        (m1, m2)
    }

    /// Fixed points `r1, r2` (equal for parabolic maps).
    pub fn fixed_points(&self) -> (SpherePoint, SpherePoint) {
        let scale = self.a.norm().max(self.b.norm()).max(self.d.norm());
        if self.c.norm() <= 1e-15 * scale {
            // Az + B = Dz has one finite root unless A = D
            let diff = self.d - self.a;
            if diff.norm() <= 1e-15 * scale {
                return (SpherePoint::Infinity, SpherePoint::Infinity);
            }
            return (SpherePoint::from_complex(self.b / diff), SpherePoint::Infinity);
        }
        // C z^2 + (D - A) z - B = 0
        let bq = self.d - self.a;
        let disc = (bq * bq + 4.0 * self.c * self.b).sqrt();
        let r1 = (-bq + disc) / (2.0 * self.c);
        let r2 = (-bq - disc) / (2.0 * self.c);
        (SpherePoint::from_complex(r1), SpherePoint::from_complex(r2))
    }

    /// Ratio `κ = (C r2 + D)/(C r1 + D)` of the fixed-point eigenvalues,
    /// with `|κ| <= 1`.
    pub fn kappa(&self) -> Complex64 {
        let (m1, m2) = self.eigenvalues();
        m2 / m1
    }

    fn is_scalar(&self) -> bool {
        let s = self.a.norm().max(self.d.norm());
        self.b.norm() <= 1e-14 * s && self.c.norm() <= 1e-14 * s && (self.a - self.d).norm() <= 1e-14 * s
    }

    pub fn classify(&self) -> MoebiusClass {
        if self.is_scalar() {
            return MoebiusClass::IdentityLike;
        }
        let (m1, m2) = self.eigenvalues();
        if (m1 - m2).norm() <= 1e-10 * m1.norm() {
            return MoebiusClass::Parabolic;
        }
        let kappa = m2 / m1;
        if (kappa.norm() - 1.0).abs() < UNIT_MODULUS_TOLERANCE {
            let x = kappa.arg() / (2.0 * PI);
            match rational_approximation(x, ANGLE_DEPTH, ANGLE_TOLERANCE) {
                Some((_, q)) => MoebiusClass::EllipticRational { period: q },
                None => MoebiusClass::EllipticIrrational {
                    rotation: x.rem_euclid(1.0),
                },
            }
        } else {
            MoebiusClass::Loxodromic {
                kappa_modulus: kappa.norm(),
            }
        }
    }

    /// `n`-th iterate from the coefficient matrix.
    ///
    /// By Cayley–Hamilton `M^n = s_n M - det(M) s_{n-1} I` with
    /// `s_n = (μ1^n - μ2^n)/(μ1 - μ2)`. Dividing by `μ1^(n-1)` and writing
    /// `μ2/μ1 = 1 + u` gives `s_n/μ1^(n-1) = expm1(n log1p u)/u`, which
    /// stays accurate as the eigenvalues merge and reduces to the Jordan
    /// form `n μ^(n-1)` in the parabolic case.
    pub fn iterate_closed(&self, n: u64) -> MoebiusMap {
        if n == 0 || self.is_scalar() {
            return Self::identity();
        }
        let (m1, m2) = self.eigenvalues();
        let u = (m2 - m1) / m1;
        let normalized_s = |k: u64| -> Complex64 {
            // s_k / μ1^(k-1)
            if k == 0 {
                return Complex64::new(0.0, 0.0);
            }
            if u.norm_sqr() == 0.0 {
                return Complex64::new(k as f64, 0.0);
            }
            expm1(log1p(u) * k as f64) / u
        };
        let sn = normalized_s(n);
        let sn1 = normalized_s(n - 1);
        let det_over = self.det() / m1;
        Self::from_matrix_normalized(
            sn * self.a - det_over * sn1,
            sn * self.b,
            sn * self.c,
            sn * self.d - det_over * sn1,
        )
    }

    /// Projective equality: `self` and `other` differ by a scalar factor.
    pub fn projective_distance(&self, other: &MoebiusMap) -> f64 {
        let x = [self.a, self.b, self.c, self.d];
        let y = [other.a, other.b, other.c, other.d];
        // align phases through the largest coefficient of x
        let k = (0..4).max_by(|&i, &j| x[i].norm().total_cmp(&x[j].norm())).unwrap_or(0);
        if y[k].norm() == 0.0 {
            return f64::INFINITY;
        }
        let s = x[k] / y[k];
        (0..4).map(|i| (x[i] - s * y[i]).norm()).fold(0.0, f64::max)
    }
}
