//! Root finding, fixed points, periodic cycles and their multipliers.

mod classify;
mod cycles;
pub mod roots;

pub use classify::{classify, MultiplierClass, NEUTRAL_TOLERANCE, SUPERATTRACTING_TOLERANCE};
pub use cycles::{
    fixed_points, multiplier, nonrepelling_count, periodic_cycles, Cycle, NonRepellingReport, CYCLE_RESIDUAL,
    GROUPING_DISTANCE, MAX_PERIOD_DEFAULT,
};
pub use roots::{clustered_roots, poly_roots, Root};
