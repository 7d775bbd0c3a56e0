use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use super::koenigs::{koenigs_chart, koenigs_series, KOENIGS_N_MAX_DEFAULT};
use crate::boettcher::{CoordinateChart, LocalGerm};
use crate::error::{Error, Result};
use crate::maps::{RationalMap, SpherePoint};

/// `|λ^s - 1|` below this is a resonance.
pub const RESONANCE_TOLERANCE: f64 = 1e-10;
pub const ABEL_N_TERMS_DEFAULT: usize = 24;

/// Reduced rational exponent `num/den`, `den >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Exponent {
    pub num: i64,
    pub den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Exponent {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("exponent with zero denominator".into()));
        }
        let sign = if (num < 0) != (den < 0) { -1 } else { 1 };
        let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd(n, d).max(1);
        Ok(Self {
            num: sign * (n / g) as i64,
            den: d / g,
        })
    }

    pub fn integer(k: i64) -> Self {
        Self { num: k, den: 1 }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn plus(&self, k: i64) -> Self {
        Self {
            num: self.num + k * self.den as i64,
            den: self.den,
        }
    }

    /// `w^e` on the principal branch (exact powers for integer exponents).
    pub fn power(&self, w: Complex64) -> Complex64 {
        if self.is_integer() {
            w.powi(self.num as i32)
        } else {
            (w.ln() * self.value()).exp()
        }
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaurentTerm {
    pub exponent: Exponent,
    pub coeff: Complex64,
}

/// `F(z) = Σ A_e (z - x)^e` over finitely many rational exponents, declared
/// convergent on `inner_radius < |z - x| < outer_radius`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaurentSeries {
    pub center: Complex64,
    pub terms: Vec<LaurentTerm>,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl LaurentSeries {
    pub fn new(center: Complex64, terms: Vec<LaurentTerm>, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(0.0 <= inner_radius && inner_radius < outer_radius) {
            return Err(Error::InvalidInput(format!(
                "annulus needs 0 <= r < R, got r = {inner_radius}, R = {outer_radius}"
            )));
        }
        if terms.iter().any(|t| !(t.coeff.re.is_finite() && t.coeff.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite Laurent coefficient".into()));
        }
        Ok(Self {
            center,
            terms,
            inner_radius,
            outer_radius,
        })
    }

    /// `A_0 + Σ_{n>=1} A_{+n} (z-x)^(m/n) + A_{-n} (z-x)^(-m/n)`, with
    /// `plus[n-1] = A_{+n}` and `minus[n-1] = A_{-n}`.
    pub fn indexed(
        center: Complex64,
        m: i64,
        a0: Complex64,
        plus: &[Complex64],
        minus: &[Complex64],
        inner_radius: f64,
        outer_radius: f64,
    ) -> Result<Self> {
        let mut terms = vec![LaurentTerm {
            exponent: Exponent::integer(0),
            coeff: a0,
        }];
        for (k, &c) in plus.iter().enumerate() {
            terms.push(LaurentTerm {
                exponent: Exponent::new(m, k as i64 + 1)?,
                coeff: c,
            });
        }
        for (k, &c) in minus.iter().enumerate() {
            terms.push(LaurentTerm {
                exponent: Exponent::new(-m, k as i64 + 1)?,
                coeff: c,
            });
        }
        terms.retain(|t| t.coeff.norm_sqr() != 0.0);
        Self::new(center, terms, inner_radius, outer_radius)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = z - self.center;
        self.terms.iter().map(|t| t.coeff * t.exponent.power(w)).sum()
    }
}

/// One term `C_s B^s / (λ^s - 1)` of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelTerm {
    pub exponent: Exponent,
    /// Coefficient of `B^s` in the re-expansion of `F`.
    pub coeff: Complex64,
    /// `λ^s - 1`
    pub denominator: Complex64,
}

/// `ψ0 = C_0 Log B / Log λ + Σ C_s B^s / (λ^s - 1)`, solving
/// `ψ0∘f - ψ0 = F` near an attracting fixed point.
#[derive(Debug, Clone)]
pub struct AbelSolution {
    pub lambda: Complex64,
    pub constant: Complex64,
    pub terms: Vec<AbelTerm>,
    pub koenigs: CoordinateChart,
    pub rhs: LaurentSeries,
    pub n_terms: usize,
    branch_sensitive: bool,
    fractional: bool,
}

/// Solve `ψ∘f - ψ = F` by expanding `F` in powers of the Koenigs
/// coordinate `B` and dividing each term by `λ^s - 1`.
pub fn abel_solve(f: &RationalMap, x: SpherePoint, rhs: &LaurentSeries, n_terms: usize) -> Result<AbelSolution> {
    let germ = LocalGerm::at(f, x)?;
    if let SpherePoint::Finite(c) = x {
        if (c - rhs.center).norm() > 1e-12 * c.norm().max(1.0) {
            return Err(Error::InvalidInput("Laurent series must be centered at the fixed point".into()));
        }
    } else {
        return Err(Error::InvalidInput("the Abel solver needs a finite fixed point".into()));
    }
    let koenigs = koenigs_chart(germ.clone(), KOENIGS_N_MAX_DEFAULT)?;
    let lambda = germ.leading();
    let n = n_terms.max(2);
    // z - x = S(b) = b U(b) with S the inverse of B
    let s = koenigs_series(&germ, n + 1)?.reversion()?;
    let u = s.shift_down(1);
    let mut collected: BTreeMap<Exponent, Complex64> = BTreeMap::new();
    for term in &rhs.terms {
        let ue = u.powc(Complex64::new(term.exponent.value(), 0.0))?;
        for j in 0..n {
            let c = term.coeff * ue.coeff(j);
            if c.norm_sqr() != 0.0 {
                *collected.entry(term.exponent.plus(j as i64)).or_default() += c;
            }
        }
    }
    let log_lambda = lambda.ln();
    let mut constant = Complex64::new(0.0, 0.0);
    let mut terms = Vec::new();
    for (index, (exponent, coeff)) in collected.into_iter().enumerate() {
        if exponent.is_zero() {
            constant = coeff;
            continue;
        }
        let denominator = (log_lambda * exponent.value()).exp() - 1.0;
        if denominator.norm() < RESONANCE_TOLERANCE {
            return Err(Error::Resonance {
                index: index as i64,
                exponent: exponent.to_string(),
            });
        }
        terms.push(AbelTerm {
            exponent,
            coeff,
            denominator,
        });
    }
    let fractional = terms.iter().any(|t| !t.exponent.is_integer());
    let branch_sensitive = constant.norm_sqr() != 0.0 || fractional;
    Ok(AbelSolution {
        lambda,
        constant,
        terms,
        koenigs,
        rhs: rhs.clone(),
        n_terms: n,
        branch_sensitive,
        fractional,
    })
}

impl AbelSolution {
    fn value_at_b(&self, b: Complex64) -> Result<Complex64> {
        if b.norm_sqr() == 0.0 && (self.constant.norm_sqr() != 0.0 || self.terms.iter().any(|t| t.exponent.num < 0))
        {
            return Err(Error::InvalidInput("ψ0 is singular at the fixed point".into()));
        }
        let mut psi = if self.constant.norm_sqr() != 0.0 {
            self.constant * b.ln() / self.lambda.ln()
        } else {
            Complex64::new(0.0, 0.0)
        };
        for t in &self.terms {
            psi += t.coeff * t.exponent.power(b) / t.denominator;
        }
        Ok(psi)
    }

    pub fn eval(&self, z: SpherePoint) -> Result<Complex64> {
        let b = self.koenigs.eval(z)?;
        self.check_branch(z, b)?;
        self.value_at_b(b)
    }

    fn check_branch(&self, z: SpherePoint, b: Complex64) -> Result<()> {
        if self.branch_sensitive && b.im == 0.0 && b.re < 0.0 {
            return Err(Error::BranchCrossing(z.to_string()));
        }
        // (z - x)^s = B^s U^s holds for principal powers only while
        // arg B + arg U stays inside (-π, π], with U = (z - x)/B near 1
        if self.fractional {
            if let (Some(zc), true) = (z.finite(), b.norm_sqr() != 0.0) {
                let turned = b.arg() + ((zc - self.rhs.center) / b).arg();
                if turned > PI || turned <= -PI {
                    return Err(Error::BranchCrossing(z.to_string()));
                }
            }
        }
        Ok(())
    }

    /// `|ψ0(f(z)) - ψ0(z) - F(z)|`. Fails with a branch error when the
    /// segment from `arg B(z)` to `arg λB(z)` crosses the cut of the
    /// logarithm, where the telescoping identity changes by a period.
    pub fn residual(&self, f: &RationalMap, z: SpherePoint) -> Result<f64> {
        let b = self.koenigs.eval(z)?;
        if self.branch_sensitive {
            let turned = b.arg() + self.lambda.arg();
            if turned > PI || turned <= -PI {
                return Err(Error::BranchCrossing(z.to_string()));
            }
        }
        self.check_branch(z, b)?;
        let image = f.eval(z)?;
        let lhs = self.eval(image)? - self.value_at_b(b)?;
        let zc = z
            .finite()
            .ok_or_else(|| Error::InvalidInput("residual needs a finite point".into()))?;
        Ok((lhs - self.rhs.eval(zc)).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_arithmetic() {
        let e = Exponent::new(4, -6).unwrap();
        assert_eq!((e.num, e.den), (-2, 3));
        assert_eq!(e.plus(1), Exponent::new(1, 3).unwrap());
        assert!(Exponent::new(1, 3).unwrap() < Exponent::new(1, 2).unwrap());
        assert_eq!(Exponent::new(3, 2).unwrap().to_string(), "3/2");
    }

    #[test]
    fn indexed_series_uses_m_over_n() {
        let s = LaurentSeries::indexed(
            Complex64::new(0.0, 0.0),
            2,
            Complex64::new(1.0, 0.0),
            &[Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)],
            &[Complex64::new(0.0, 0.0), Complex64::new(5.0, 0.0)],
            0.0,
            1.0,
        )
        .unwrap();
        let exps: Vec<String> = s.terms.iter().map(|t| t.exponent.to_string()).collect();
        assert_eq!(exps, vec!["0", "2", "1", "-1"]);
        let z = Complex64::new(0.25, 0.0);
        let expected = 1.0 + 0.0625 + 3.0 * 0.25 + 5.0 * 4.0;
        assert!((s.eval(z) - expected).norm() < 1e-14);
    }

    fn origin() -> SpherePoint {
        SpherePoint::new(0.0, 0.0)
    }

    fn half() -> RationalMap {
        RationalMap::poly_desc(&[0.5, 0.0]).unwrap()
    }

    fn monomial_rhs(m: i64, a0: f64) -> LaurentSeries {
        let zero = Complex64::new(0.0, 0.0);
        let plus: Vec<Complex64> = if m > 0 { vec![Complex64::new(1.0, 0.0)] } else { vec![] };
        LaurentSeries::indexed(zero, m.max(1), Complex64::new(a0, 0.0), &plus, &[], 0.0, 1.0).unwrap()
    }

    #[test]
    fn exact_linear_cases() {
        let z = Complex64::new(0.3, 0.2);
        let p = SpherePoint::Finite(z);
        let psi = abel_solve(&half(), origin(), &monomial_rhs(1, 0.0), ABEL_N_TERMS_DEFAULT).unwrap();
        assert_eq!(psi.eval(p).unwrap(), -2.0 * z);
        let psi = abel_solve(&half(), origin(), &monomial_rhs(2, 0.0), ABEL_N_TERMS_DEFAULT).unwrap();
        assert!((psi.eval(p).unwrap() - (-4.0 * z * z / 3.0)).norm() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn constant_rhs_uses_logarithm() {
        let psi = abel_solve(&half(), origin(), &monomial_rhs(0, 0.7), ABEL_N_TERMS_DEFAULT).unwrap();
        let z = Complex64::new(0.3, 0.2);
        let expected = 0.7 * z.ln() / 0.5f64.ln();
        assert!((psi.eval(SpherePoint::Finite(z)).unwrap() - expected).norm() < 1e-15);
        assert!(psi.residual(&half(), SpherePoint::Finite(z)).unwrap() < 1e-14);
        assert!(matches!(
            psi.eval(SpherePoint::new(-0.2, 0.0)),
            Err(Error::BranchCrossing(_))
        ));
    }

    #[test]
    fn branch_crossing_under_rotation() {
        // λ = i/2 turns B by a quarter; points in the second quadrant wrap
        let f = RationalMap::polynomial(crate::maps::Polynomial::monomial(Complex64::new(0.0, 0.5), 1)).unwrap();
        let psi = abel_solve(&f, origin(), &monomial_rhs(0, 1.0), 8).unwrap();
        assert!(psi.residual(&f, SpherePoint::new(0.2, 0.1)).is_ok());
        assert!(matches!(
            psi.residual(&f, SpherePoint::new(-0.2, 0.1)),
            Err(Error::BranchCrossing(_))
        ));
    }

    #[test]
    fn fractional_exponent_and_center_mismatch() {
        let zero = Complex64::new(0.0, 0.0);
        let rhs = LaurentSeries::indexed(zero, 1, zero, &[zero, Complex64::new(1.0, 0.0)], &[], 0.0, 1.0).unwrap();
        let psi = abel_solve(&half(), origin(), &rhs, 8).unwrap();
        let z = Complex64::new(0.04, 0.01);
        let expected = z.sqrt() / (0.5f64.sqrt() - 1.0);
        assert!((psi.eval(SpherePoint::Finite(z)).unwrap() - expected).norm() < 1e-15);
        let shifted = LaurentSeries::indexed(Complex64::new(0.1, 0.0), 1, zero, &[], &[], 0.0, 1.0).unwrap();
        assert!(abel_solve(&half(), origin(), &shifted, 8).is_err());
    }

    #[test]
    fn nonlinear_residual_and_telescoping() {
        let f = RationalMap::poly_desc(&[1.0, 0.5, 0.0]).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let rhs = LaurentSeries::indexed(
            zero,
            1,
            Complex64::new(0.3, 0.0),
            &[Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.1)],
            &[Complex64::new(0.01, 0.0)],
            0.0,
            0.05,
        )
        .unwrap();
        let psi = abel_solve(&f, origin(), &rhs, ABEL_N_TERMS_DEFAULT).unwrap();
        for z in [Complex64::new(0.03, 0.01), Complex64::new(0.04, -0.01), Complex64::new(0.01, 0.02)] {
            let p = SpherePoint::Finite(z);
            assert!(psi.residual(&f, p).unwrap() < 1e-8);
            let mut w = z;
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 0..5 {
                sum += rhs.eval(w);
                w = f.eval(SpherePoint::Finite(w)).unwrap().finite().unwrap();
            }
            let lhs = psi.eval(SpherePoint::Finite(w)).unwrap() - psi.eval(p).unwrap();
            assert!((lhs - sum).norm() < 1e-7);
        }
    }
}
