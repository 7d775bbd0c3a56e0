use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::maps::{rational_approximation, ANGLE_DEPTH, ANGLE_TOLERANCE};

/// `| |λ| - 1 |` below this is treated as neutral.
pub const NEUTRAL_TOLERANCE: f64 = 1e-9;
/// `|λ|` below this is treated as zero.
pub const SUPERATTRACTING_TOLERANCE: f64 = 1e-9;

/// Local behaviour of a fixed point or cycle, read off its multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum MultiplierClass {
    Superattracting,
    Attracting,
    Repelling,
    /// `λ` is a root of unity of order `order`; `parabolic` when `λ = 1`.
    RationallyNeutral { order: u64, parabolic: bool },
    IrrationallyNeutral { rotation: f64 },
}

impl MultiplierClass {
    pub fn is_repelling(&self) -> bool {
        matches!(self, MultiplierClass::Repelling)
    }

    pub fn name(&self) -> &'static str {
        match self {
            MultiplierClass::Superattracting => "superattracting",
            MultiplierClass::Attracting => "attracting",
            MultiplierClass::Repelling => "repelling",
            MultiplierClass::RationallyNeutral { parabolic: true, .. } => "parabolic",
            MultiplierClass::RationallyNeutral { .. } => "rationally-neutral",
            MultiplierClass::IrrationallyNeutral { .. } => "irrationally-neutral",
        }
    }
}

pub fn classify(lambda: Complex64) -> MultiplierClass {
    let r = lambda.norm();
    if r < SUPERATTRACTING_TOLERANCE {
        return MultiplierClass::Superattracting;
    }
    if (r - 1.0).abs() < NEUTRAL_TOLERANCE {
        let x = (lambda.arg() / (2.0 * PI)).rem_euclid(1.0);
        return match rational_approximation(x, ANGLE_DEPTH, ANGLE_TOLERANCE) {
            Some((p, q)) => MultiplierClass::RationallyNeutral {
                order: q,
                parabolic: p == 0 || p as u64 == q,
            },
            None => MultiplierClass::IrrationallyNeutral { rotation: x },
        };
    }
    if r < 1.0 {
        MultiplierClass::Attracting
    } else {
        MultiplierClass::Repelling
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classification_examples() {
        assert_eq!(classify(Complex64::new(0.0, 0.0)), MultiplierClass::Superattracting);
        assert_eq!(
            classify(Complex64::new(1.0, 0.0)),
            MultiplierClass::RationallyNeutral {
                order: 1,
                parabolic: true
            }
        );
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(matches!(
            classify(Complex64::from_polar(1.0, 2.0 * PI * golden)),
            MultiplierClass::IrrationallyNeutral { .. }
        ));
        assert_eq!(
            classify(Complex64::new(-1.0, 0.0)),
            MultiplierClass::RationallyNeutral {
                order: 2,
                parabolic: false
            }
        );
        assert_eq!(classify(Complex64::new(0.5, 0.1)), MultiplierClass::Attracting);
        assert_eq!(classify(Complex64::new(0.0, 2.0)), MultiplierClass::Repelling);
    }

    proptest! {
        #[test]
        fn stable_under_tiny_relative_perturbation(
            r in 0.0f64..3.0, theta in 0.0f64..6.28, eps in -1e-12f64..1e-12,
        ) {
            prop_assume!((r - 1.0).abs() > 2.0 * NEUTRAL_TOLERANCE);
            prop_assume!((r - SUPERATTRACTING_TOLERANCE).abs() > 1e-10);
            let lambda = Complex64::from_polar(r, theta);
            let a = classify(lambda);
            let b = classify(lambda * (1.0 + eps));
            prop_assert_eq!(a.name(), b.name());
        }
    }
}
