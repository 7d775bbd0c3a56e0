//! Numerical holomorphic dynamics in one complex variable.
//!
//! Rational maps of the Riemann sphere and their iteration, periodic cycles
//! and multipliers, Böttcher and Koenigs coordinates, the Abel-type equation
//! `ψ∘f - ψ = F`, Möbius and quadratic iteration, Lattès maps, Julia-set
//! approximation and Newton basins. The `holodyn` binary exposes the library
//! through a small command-line interface.

pub mod boettcher;
pub mod cli;
pub mod error;
pub mod fixedpoints;
pub mod julia;
pub mod linearize;
pub mod maps;
pub mod newton;
pub mod series;

pub use error::{Error, Result};
