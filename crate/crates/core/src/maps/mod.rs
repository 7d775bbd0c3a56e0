//! Complex arithmetic on the sphere, polynomial and rational-map algebra,
//! iteration, Möbius maps and the quadratic canonical form.

mod moebius;
mod orbit;
mod polynomial;
mod quadratic;
mod rational;
mod sphere;

pub use moebius::{MoebiusClass, MoebiusMap, ANGLE_DEPTH, ANGLE_TOLERANCE, UNIT_MODULUS_TOLERANCE};
pub use orbit::{iterate_orbit, Orbit};
pub use polynomial::Polynomial;
pub use quadratic::{affine_polynomial, normalize_quadratic, quadratic, QuadraticNormalForm};
pub use rational::{ChartedMap, RationalMap, COPRIME_TOLERANCE, SYMBOLIC_DEGREE_CAP};
pub use sphere::{
    expm1, format_complex, log1p, nearest_root, rational_approximation, Chart, ComplexNumber, SpherePoint,
};


