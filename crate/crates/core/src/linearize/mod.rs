//! Koenigs linearization, the Abel-type equation `ψ∘f - ψ = F`, and
//! iterative roots of polynomials.

mod abel;
mod iterroot;
mod koenigs;

pub use abel::{
    abel_solve, AbelSolution, AbelTerm, Exponent, LaurentSeries, LaurentTerm, ABEL_N_TERMS_DEFAULT,
    RESONANCE_TOLERANCE,
};
pub use iterroot::{poly_iter_root, ITERATIVE_ROOT_RESIDUAL};
pub use koenigs::{koenigs, koenigs_chart, koenigs_repelling, koenigs_series, KOENIGS_N_MAX_DEFAULT, KOENIGS_TOLERANCE};
