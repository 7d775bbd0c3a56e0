use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{RationalMap, SpherePoint};

/// Which construction produced a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartMethod {
    Ritt,
    Milnor,
    Series,
    #[serde(rename = "original-1904")]
    Original1904,
    Koenigs,
    Psi0,
}

impl ChartMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ChartMethod::Ritt => "ritt",
            ChartMethod::Milnor => "milnor",
            ChartMethod::Series => "series",
            ChartMethod::Original1904 => "original-1904",
            ChartMethod::Koenigs => "koenigs",
            ChartMethod::Psi0 => "psi0",
        }
    }
}

/// The model map a chart conjugates to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelMap {
    /// `F∘f = F^m`
    Power { m: usize },
    /// `B∘f = λB`
    Linear { lambda: Complex64 },
}

impl ModelMap {
    pub fn apply(&self, v: Complex64) -> Complex64 {
        match *self {
            ModelMap::Power { m } => v.powu(m as u32),
            ModelMap::Linear { lambda } => lambda * v,
        }
    }
}

/// Iteration and truncation parameters a chart was built with.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ChartParams {
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_terms: Option<usize>,
    /// Half-plane threshold of the logarithmic lift.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// `α` with `α^(m-1) = a`, so that `F(z) = αw + O(w^2)` in the local
    /// coordinate `w`.
    pub normalizer: Complex64,
}

type Evaluator = Arc<dyn Fn(SpherePoint) -> Result<Complex64> + Send + Sync>;

/// A conjugating coordinate near a fixed point, evaluated lazily.
///
/// The validity radius is measured in the local coordinate `w = z - x`, or
/// `w = 1/z` when the center is infinity; the chart reports values only for
/// `|w| < validity_radius`.
#[derive(Clone)]
pub struct CoordinateChart {
    pub center: SpherePoint,
    pub local_degree: usize,
    pub validity_radius: f64,
    pub method: ChartMethod,
    pub model: ModelMap,
    pub params: ChartParams,
    /// Taylor coefficients in the local coordinate, when the chart is a series.
    pub coefficients: Option<Vec<Complex64>>,
    evaluator: Evaluator,
}

impl fmt::Debug for CoordinateChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoordinateChart")
            .field("center", &self.center)
            .field("local_degree", &self.local_degree)
            .field("validity_radius", &self.validity_radius)
            .field("method", &self.method)
            .field("model", &self.model)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

/// Serializable metadata of a chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartSummary {
    pub center: SpherePoint,
    pub local_degree: usize,
    pub validity_radius: f64,
    pub method: ChartMethod,
    #[serde(flatten)]
    pub model: ModelMap,
    pub params: ChartParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Complex64>>,
}

impl CoordinateChart {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        center: SpherePoint,
        local_degree: usize,
        validity_radius: f64,
        method: ChartMethod,
        model: ModelMap,
        params: ChartParams,
        coefficients: Option<Vec<Complex64>>,
        evaluator: Evaluator,
    ) -> Self {
        Self {
            center,
            local_degree,
            validity_radius,
            method,
            model,
            params,
            coefficients,
            evaluator,
        }
    }

    pub fn eval(&self, z: SpherePoint) -> Result<Complex64> {
        (self.evaluator)(z)
    }

    /// Local coordinate of `z` relative to the chart center.
    pub fn local(&self, z: SpherePoint) -> Option<Complex64> {
        match (self.center, z) {
            (SpherePoint::Finite(x), SpherePoint::Finite(z)) => Some(z - x),
            (SpherePoint::Infinity, SpherePoint::Infinity) => Some(Complex64::new(0.0, 0.0)),
            (SpherePoint::Infinity, SpherePoint::Finite(z)) if z.norm_sqr() > 0.0 => Some(z.inv()),
            _ => None,
        }
    }

    /// Inverse of [`CoordinateChart::local`].
    pub fn point(&self, w: Complex64) -> SpherePoint {
        match self.center {
            SpherePoint::Finite(x) => SpherePoint::Finite(x + w),
            SpherePoint::Infinity => SpherePoint::Finite(w).reciprocal(),
        }
    }

    pub fn contains(&self, z: SpherePoint) -> bool {
        self.local(z).is_some_and(|w| w.norm() < self.validity_radius)
    }

    /// `|F(f(z)) - model(F(z))| / max(1, |model(F(z))|)`.
    pub fn residual(&self, f: &RationalMap, z: SpherePoint) -> Result<f64> {
        let fz = self.eval(z)?;
        let target = self.model.apply(fz);
        let image = f.eval(z)?;
        let lhs = self.eval(image)?;
        Ok((lhs - target).norm() / target.norm().max(1.0))
    }

    /// `count` deterministic points of the punctured validity disk, spread
    /// over radii up to `fraction * validity_radius`.
    pub fn samples(&self, count: usize, fraction: f64) -> Vec<SpherePoint> {
        sample_disk(self.validity_radius * fraction, count)
            .into_iter()
            .map(|w| self.point(w))
            .collect()
    }

    pub fn summary(&self) -> ChartSummary {
        ChartSummary {
            center: self.center,
            local_degree: self.local_degree,
            validity_radius: self.validity_radius,
            method: self.method,
            model: self.model,
            params: self.params.clone(),
            coefficients: self.coefficients.clone(),
        }
    }
}

/// Golden-angle spiral of `count` points in the punctured disk of radius `r`.
pub fn sample_disk(r: f64, count: usize) -> Vec<Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let rho = r * ((k as f64 + 0.5) / count as f64).sqrt();
            Complex64::from_polar(rho, golden * k as f64)
        })
        .collect()
}

pub(crate) fn outside(z: SpherePoint, radius: f64) -> Error {
    Error::OutsideValidity(format!("{z} lies outside the chart disk of local radius {radius:e}"))
}
