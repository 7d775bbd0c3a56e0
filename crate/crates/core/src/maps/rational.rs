use num_complex::Complex64;

use super::{Chart, Polynomial, SpherePoint};
use crate::error::{Error, Result};
use crate::fixedpoints::roots::{clustered_roots, poly_roots};

/// Symbolic composition refuses results above this degree.
pub const SYMBOLIC_DEGREE_CAP: usize = 64;
/// Relative tolerance for declaring a root of `Q` a root of `P` as well.
pub const COPRIME_TOLERANCE: f64 = 1e-9;

/// A rational map `P/Q` of the Riemann sphere with `P`, `Q` coprime.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

impl RationalMap {
    /// Build `P/Q`, cancelling common roots. Requires `Q != 0` and degree >= 1.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        let map = Self::reduced(num, den)?;
        if map.degree() == 0 {
            return Err(Error::MalformedMap("constant map has degree 0".into()));
        }
        Ok(map)
    }

    /// Like [`RationalMap::new`] but allows constant results (used for
    /// derivatives).
    pub fn reduced(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::MalformedMap("denominator is identically zero".into()));
        }
        let (num, den) = cancel_common_roots(num, den)?;
        Ok(Self { num, den })
    }

    pub fn polynomial(p: Polynomial) -> Result<Self> {
        Self::new(p, Polynomial::one())
    }

    /// Convenience constructor from real coefficients, highest degree first.
    pub fn poly_desc(coeffs: &[f64]) -> Result<Self> {
        Self::polynomial(Polynomial::new(coeffs.iter().rev().map(|&c| Complex64::new(c, 0.0)).collect()))
    }

    /// Build without coprimality reduction. Caller guarantees the invariant.
    pub(crate) fn from_parts_unchecked(num: Polynomial, den: Polynomial) -> Self {
        Self { num, den }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn degree(&self) -> usize {
        if self.num.is_zero() {
            return 0;
        }
        self.num.degree().max(self.den.degree())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// `f(z)` as a polynomial when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if self.is_polynomial() {
            Some(self.num.scaled(self.den.coeff(0).inv()))
        } else {
            None
        }
    }

    /// Evaluate on the sphere. Poles map to infinity; infinity is handled
    /// through the conjugate `1/f(1/w)` at `w = 0`.
    pub fn eval(&self, z: SpherePoint) -> Result<SpherePoint> {
        let d = self.degree();
        match z {
            SpherePoint::Infinity => {
                let (p, q) = (self.num.coeff(d), self.den.coeff(d));
                ratio(p, q)
            }
            SpherePoint::Finite(z) => {
                if z.norm_sqr() > 1.0 {
                    let w = z.inv();
                    let p = self.num.reversed(d).eval(w);
                    let q = self.den.reversed(d).eval(w);
                    ratio(p, q)
                } else {
                    ratio(self.num.eval(z), self.den.eval(z))
                }
            }
        }
    }

    /// Evaluate at a finite point, returning infinity at poles.
    pub fn eval_c(&self, z: Complex64) -> SpherePoint {
        self.eval(SpherePoint::Finite(z)).unwrap_or(SpherePoint::Infinity)
    }

    /// `(P'Q - PQ')/Q^2` reduced to coprime form.
    pub fn derivative(&self) -> Result<RationalMap> {
        let w = self.wronskian();
        let q2 = &self.den * &self.den;
        Self::reduced(w, q2)
    }

    /// `P'Q - PQ'`; its zeros are the finite critical points.
    pub fn wronskian(&self) -> Polynomial {
        &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative())
    }

    /// Derivative at a finite point that is not a pole.
    pub fn derivative_at(&self, z: Complex64) -> Complex64 {
        let (p, dp) = self.num.eval_with_derivative(z);
        let (q, dq) = self.den.eval_with_derivative(z);
        (dp * q - p * dq) / (q * q)
    }

    /// Value at a finite non-pole point.
    pub fn value_at(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `f ∘ g`, reduced. Errors when the degree would exceed
    /// [`SYMBOLIC_DEGREE_CAP`] or coefficients overflow.
    pub fn compose(&self, g: &RationalMap) -> Result<RationalMap> {
        let d = self.degree();
        let e = g.degree();
        if d * e > SYMBOLIC_DEGREE_CAP {
            return Err(Error::DegreeCap {
                degree: d * e,
                cap: SYMBOLIC_DEGREE_CAP,
            });
        }
        // f(R/S) = sum p_i R^i S^(d-i) / sum q_i R^i S^(d-i)
        let mut r_pows = vec![Polynomial::one()];
        let mut s_pows = vec![Polynomial::one()];
        for k in 1..=d {
            r_pows.push(&r_pows[k - 1] * &g.num);
            s_pows.push(&s_pows[k - 1] * &g.den);
        }
        let mut num = Polynomial::zero();
        let mut den = Polynomial::zero();
        for i in 0..=d {
            let term = &r_pows[i] * &s_pows[d - i];
            let (p, q) = (self.num.coeff(i), self.den.coeff(i));
            if p.norm_sqr() != 0.0 {
                num = &num + &term.scaled(p);
            }
            if q.norm_sqr() != 0.0 {
                den = &den + &term.scaled(q);
            }
        }
        if !num.is_finite() || !den.is_finite() {
            return Err(Error::CoefficientOverflow(d * e));
        }
        // the homogeneous resultant of coprime inputs is nonzero, so the
        // composite is already reduced; a tolerance-based cancellation here
        // would only remove near-common roots that are not common
        let (num, den) = normalize_pair(num, den);
        Ok(Self::from_parts_unchecked(num, den))
    }

    /// `n`-fold symbolic iterate.
    pub fn iterate_symbolic(&self, n: usize) -> Result<RationalMap> {
        if n == 0 {
            return Self::new(Polynomial::z(), Polynomial::one());
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Conjugate by inversion: `w ↦ 1/f(1/w)`.
    pub fn conjugate_at_infinity(&self) -> RationalMap {
        let d = self.degree();
        Self::from_parts_unchecked(self.den.reversed(d), self.num.reversed(d))
    }

    /// Multiply numerator and denominator so the largest coefficient has
    /// modulus 1.
    pub fn normalized(&self) -> RationalMap {
        let (num, den) = normalize_pair(self.num.clone(), self.den.clone());
        Self { num, den }
    }

    /// Critical points with multiplicity: zeros of the Wronskian `P'Q - PQ'`,
    /// plus infinity with multiplicity `2d - 2 - deg W` (the order of
    /// vanishing of the homogeneous Wronskian at infinity, equivalently of
    /// the derivative of the conjugate map at 0).
    pub fn critical_points(&self) -> Result<Vec<SpherePoint>> {
        let d = self.degree();
        if d < 2 {
            return Err(Error::InvalidInput(format!("critical points need degree >= 2, got {d}")));
        }
        let w = self.wronskian().trimmed(1e-13);
        let mut out: Vec<SpherePoint> = if w.degree() >= 1 {
            poly_roots(&w)?.into_iter().map(SpherePoint::Finite).collect()
        } else {
            Vec::new()
        };
        let at_infinity = (2 * d - 2).saturating_sub(w.degree());
        out.extend(std::iter::repeat(SpherePoint::Infinity).take(at_infinity));
        Ok(out)
    }

    /// Precompute the chart representations used for derivatives on the sphere.
    pub fn charted(&self) -> ChartedMap {
        ChartedMap::new(self)
    }

    /// Maximum coefficient modulus in the (normalized) representation.
    pub fn coefficient_scale(&self) -> f64 {
        self.num.scale().max(self.den.scale())
    }
}

fn ratio(p: Complex64, q: Complex64) -> Result<SpherePoint> {
    if q.norm_sqr() == 0.0 {
        if p.norm_sqr() == 0.0 {
            return Err(Error::MalformedMap("0/0 during evaluation".into()));
        }
        return Ok(SpherePoint::Infinity);
    }
    Ok(SpherePoint::from_complex(p / q))
}

fn normalize_pair(num: Polynomial, den: Polynomial) -> (Polynomial, Polynomial) {
    let s = num.scale().max(den.scale());
    if s == 0.0 || !s.is_finite() {
        return (num, den);
    }
    let k = Complex64::new(1.0 / s, 0.0);
    (num.scaled(k), den.scaled(k))
}

/// Remove roots of `den` that are also roots of `num` (within
/// [`COPRIME_TOLERANCE`] in backward-error terms).
fn cancel_common_roots(mut num: Polynomial, mut den: Polynomial) -> Result<(Polynomial, Polynomial)> {
    if num.is_zero() {
        return Ok((num, Polynomial::one()));
    }
    if den.degree() == 0 || num.degree() == 0 {
        return Ok((num, den));
    }
    // exact common zeros at the origin first
    let k = num.low_order().min(den.low_order());
    if k > 0 {
        num = num.shift_down(k);
        den = den.shift_down(k);
    }
    if den.degree() == 0 || num.degree() == 0 {
        return Ok((num, den));
    }
    let roots = clustered_roots(&den)?;
    for root in roots {
        for _ in 0..root.multiplicity {
            if num.degree() == 0 || den.degree() == 0 {
                break;
            }
            if num.backward_error(root.value) < COPRIME_TOLERANCE {
                num = num.deflate(root.value).0;
                den = den.deflate(root.value).0;
            } else {
                break;
            }
        }
    }
    Ok((num, den))
}

/// The four chart representations of `f`: `f`, `1/f`, `f(1/u)`, `1/f(1/u)`.
///
/// Stepping a point through [`ChartedMap::step`] yields the image together
/// with the derivative in the charts of source and image, so multipliers and
/// spherical derivatives can be accumulated without ever evaluating near a
/// pole in the wrong chart.
#[derive(Debug, Clone)]
pub struct ChartedMap {
    plane_plane: RationalMap,
    plane_inv: RationalMap,
    inv_plane: RationalMap,
    inv_inv: RationalMap,
}

impl ChartedMap {
    pub fn new(f: &RationalMap) -> Self {
        let d = f.degree();
        let pr = f.num.reversed(d);
        let qr = f.den.reversed(d);
        Self {
            plane_plane: f.clone(),
            plane_inv: RationalMap::from_parts_unchecked(f.den.clone(), f.num.clone()),
            inv_plane: RationalMap::from_parts_unchecked(pr.clone(), qr.clone()),
            inv_inv: RationalMap::from_parts_unchecked(qr, pr),
        }
    }

    /// Image of `z` and the derivative of `f` expressed in the charts of `z`
    /// and of its image (see [`SpherePoint::chart`]).
    pub fn step(&self, z: SpherePoint) -> Result<(SpherePoint, Complex64)> {
        let (src, u) = z.chart();
        let image = match src {
            Chart::Plane => self.plane_plane.eval(SpherePoint::Finite(u))?,
            Chart::Inverted => self.inv_plane.eval(SpherePoint::Finite(u))?,
        };
        let (dst, _) = image.chart();
        Ok((image, self.map_for(src, dst).derivative_at(u)))
    }

    /// Derivative of `f` at `z`, from the chart of `z` into the chart `dst`.
    ///
    /// Used when the chart of the image is dictated by a neighbouring point
    /// (for example the next point of a cycle) rather than by the computed
    /// image itself.
    pub fn derivative_in(&self, z: SpherePoint, dst: Chart) -> Complex64 {
        let (src, u) = z.chart();
        self.map_for(src, dst).derivative_at(u)
    }

    fn map_for(&self, src: Chart, dst: Chart) -> &RationalMap {
        match (src, dst) {
            (Chart::Plane, Chart::Plane) => &self.plane_plane,
            (Chart::Plane, Chart::Inverted) => &self.plane_inv,
            (Chart::Inverted, Chart::Plane) => &self.inv_plane,
            (Chart::Inverted, Chart::Inverted) => &self.inv_inv,
        }
    }

    /// Spherical-metric derivative `|f'(z)|(1+|z|^2)/(1+|f(z)|^2)` and the image.
    pub fn spherical_step(&self, z: SpherePoint) -> Result<(SpherePoint, f64)> {
        let (_, u) = z.chart();
        let (image, d) = self.step(z)?;
        let (_, v) = image.chart();
        Ok((image, d.norm() * (1.0 + u.norm_sqr()) / (1.0 + v.norm_sqr())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn composition_keeps_full_degree() {
        // the third iterate has denominator roots within 1e-9 backward error
        // of numerator roots that are nonetheless distinct
        let num = Polynomial::new(vec![c(-1.0484105003374484, 0.0), c(-0.44268256384588844, 1.7475357263934577)]);
        let den = Polynomial::new(vec![
            c(0.0, 0.0),
            c(1.5966723941954515, 1.5019694295654302),
            c(1.975838062946304, 0.0),
            c(0.0, 1.7563816722183951),
        ]);
        let f = RationalMap::new(num, den).unwrap();
        let f3 = f.iterate_symbolic(3).unwrap();
        assert_eq!(f3.degree(), 27);
        let z = SpherePoint::new(0.3, 0.0);
        let expected = c(0.748_117_201_597_997_3, 1.139_963_789_776_905_5);
        assert!((f3.eval(z).unwrap().finite().unwrap() - expected).norm() < 1e-13);
    }

    fn newton_quadratic() -> RationalMap {
        // (z^2+1)/(2z)
        RationalMap::new(Polynomial::from_real(&[1.0, 0.0, 1.0]), Polynomial::from_real(&[0.0, 2.0])).unwrap()
    }

    #[test]
    fn eval_examples() {
        let sq = RationalMap::poly_desc(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(sq.eval(SpherePoint::new(2.0, 0.0)).unwrap(), SpherePoint::new(4.0, 0.0));
        let inv = RationalMap::new(Polynomial::from_real(&[-1.0]), Polynomial::z()).unwrap();
        assert_eq!(inv.eval(SpherePoint::new(0.0, 0.0)).unwrap(), SpherePoint::Infinity);
        assert_eq!(newton_quadratic().eval(SpherePoint::Infinity).unwrap(), SpherePoint::Infinity);
    }

    #[test]
    fn common_factor_is_cancelled() {
        // (z-1)(z+2) / ((z-1)(z-3))
        let a = Polynomial::linear_factor(c(1.0, 0.0));
        let num = &a * &Polynomial::linear_factor(c(-2.0, 0.0));
        let den = &a * &Polynomial::linear_factor(c(3.0, 0.0));
        let f = RationalMap::new(num, den).unwrap();
        assert_eq!(f.degree(), 1);
    }

    #[test]
    fn zero_over_zero_is_malformed() {
        let f = RationalMap::from_parts_unchecked(Polynomial::z(), Polynomial::z());
        assert!(matches!(f.eval(SpherePoint::new(0.0, 0.0)), Err(Error::MalformedMap(_))));
    }

    #[test]
    fn derivative_examples() {
        let sq = RationalMap::poly_desc(&[1.0, 0.0, 0.0]).unwrap();
        let d = sq.derivative().unwrap();
        assert!((d.value_at(c(1.5, 0.0)) - c(3.0, 0.0)).norm() < 1e-14);

        let inv = RationalMap::new(Polynomial::one(), Polynomial::z()).unwrap();
        let d = inv.derivative().unwrap();
        assert!((d.value_at(c(2.0, 0.0)) - c(-0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_of_newton_map_against_finite_differences() {
        // (z^2+1)/(2z) -> (z^2-1)/(2z^2); oracle: central differences
        let f = newton_quadratic();
        let d = f.derivative().unwrap();
        let expected = RationalMap::new(
            Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            Polynomial::from_real(&[0.0, 0.0, 2.0]),
        )
        .unwrap();
        let pts = [c(0.7, 0.2), c(-1.3, 0.9), c(2.1, -0.4), c(0.3, -1.7), c(-0.8, -0.6)];
        for z in pts {
            let h = 1e-5;
            let fd = (f.value_at(z + h) - f.value_at(z - h)) / (2.0 * h);
            let got = d.value_at(z);
            assert!((got - fd).norm() / got.norm() < 1e-7);
            assert!((got - expected.value_at(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn compose_examples() {
        let sq = RationalMap::poly_desc(&[1.0, 0.0, 0.0]).unwrap();
        let z4 = sq.compose(&sq).unwrap();
        assert_eq!(z4.degree(), 4);
        assert!((z4.value_at(c(1.1, 0.3)) - c(1.1, 0.3).powu(4)).norm() < 1e-12);

        // (z^2+1)∘(z^2+1) = z^4 + 2z^2 + 2; oracle: evaluation at 10 points
        let g = RationalMap::poly_desc(&[1.0, 0.0, 1.0]).unwrap();
        let gg = g.compose(&g).unwrap();
        let expected = Polynomial::from_real(&[2.0, 0.0, 2.0, 0.0, 1.0]);
        for k in 0..10 {
            let z = c(-1.0 + 0.23 * k as f64, 0.5 - 0.11 * k as f64);
            assert!((gg.value_at(z) - expected.eval(z)).norm() < 1e-9);
        }
    }

    #[test]
    fn degree_cap_is_enforced() {
        let f = RationalMap::poly_desc(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(f.compose(&f.compose(&f).unwrap_or(f.clone())), Err(Error::DegreeCap { .. })));
    }

    #[test]
    fn critical_point_examples() {
        let sq = RationalMap::poly_desc(&[1.0, 0.0, 0.0]).unwrap();
        let cp = sq.critical_points().unwrap();
        assert_eq!(cp.len(), 2);
        assert!(cp.contains(&SpherePoint::Infinity));
        assert!(cp.iter().any(|p| p.chordal(&SpherePoint::new(0.0, 0.0)) < 1e-12));

        let cp = newton_quadratic().critical_points().unwrap();
        assert_eq!(cp.len(), 2);
        for e in [1.0, -1.0] {
            assert!(cp.iter().any(|p| p.chordal(&SpherePoint::new(e, 0.0)) < 1e-12));
        }

        let cubic = RationalMap::poly_desc(&[1.0, 0.0, -3.0, 0.0]).unwrap();
        let cp = cubic.critical_points().unwrap();
        assert_eq!(cp.len(), 4);
        assert_eq!(cp.iter().filter(|p| p.is_infinite()).count(), 2);
    }

    #[test]
    fn charted_step_at_infinity() {
        // z^2 at infinity: conjugate w^2, derivative 0
        let sq = RationalMap::poly_desc(&[1.0, 0.0, 0.0]).unwrap();
        let (img, d) = sq.charted().step(SpherePoint::Infinity).unwrap();
        assert!(img.is_infinite());
        assert!(d.norm() < 1e-15);
    }
}
