use thiserror::Error;

/// Errors produced by the numerical routines.
///
/// The CLI maps every variant to the "numeric" exit code; parse and I/O
/// failures live in [`CliError` in the cli module].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed map: {0}")]
    MalformedMap(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("symbolic degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("coefficient overflow while composing maps of degree {0}")]
    CoefficientOverflow(usize),

    #[error("root finder did not converge after {iterations} iterations (worst backward error {worst:e})")]
    NoConvergence {
        iterations: usize,
        worst: f64,
        residuals: Vec<f64>,
    },

    #[error("leading coefficient A is zero: the map is not quadratic")]
    NotQuadratic,

    #[error("point lies outside the chart's validity region: {0}")]
    OutsideValidity(String),

    #[error("root branch is ambiguous at step {step}")]
    DegenerateBranch { step: usize },

    #[error("fixed point has multiplier {modulus} which is not of the required type ({expected})")]
    WrongFixedPointType { modulus: f64, expected: &'static str },

    #[error("point is not a fixed point of the map (residual {0:e})")]
    NotFixed(f64),

    #[error("resonant denominator for exponent {exponent} (index {index})")]
    Resonance { index: i64, exponent: String },

    #[error("logarithm branch crossing while evaluating at {0}")]
    BranchCrossing(String),

    #[error("{0} is not an integer power of {1}")]
    InvalidExponent(usize, usize),

    #[error("degenerate lattice: discriminant g2^3 - 27 g3^2 vanishes")]
    DegenerateLattice,

    #[error("point is within tolerance of a lattice pole")]
    Pole,

    #[error("polynomial has a repeated root near {0}")]
    NotSquarefree(String),

    #[error("seed point is exceptional (finite backward orbit)")]
    ExceptionalSeed,

    #[error("cycle point residual {0:e} is too large")]
    CycleResidual(f64),

    #[error("series chart disk shrank below {0:e} while avoiding zeros of f(z)/z^m")]
    LogBranchFailure(f64),

    #[error("iteration did not converge: {0}")]
    IterationFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
