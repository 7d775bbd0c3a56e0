//! Julia-set approximation by inverse iteration and escape time, Lattès
//! maps with the Weierstrass `℘` function, and diagnostics for
//! non-normality and transitivity.

mod diagnostics;
mod inverse;
mod lattes;
mod lattice;
mod raster;

pub use diagnostics::{
    flags_non_normality, marty_diagnostic, transitivity_probe, Region, MARTY_THRESHOLD, TRANSITIVITY_SAMPLES,
};
pub use inverse::{
    inverse_iteration, is_exceptional, preimages, CloudPoint, PointCloud, EXCEPTIONAL_LEVELS, INVERSE_CAP_DEFAULT,
    PREIMAGE_RESIDUAL,
};
pub use lattes::{lattes_sn, lattes_weierstrass, DISCRIMINANT_TOLERANCE};
pub use lattice::{lemniscate_constant, weierstrass_p, LatticeSpec, POLE_TOLERANCE, TRUNCATION_FACTOR};
pub use raster::{
    default_escape_radius, escape_time_raster, Cell, Palette, RasterGrid, Viewport, MAX_ITER_DEFAULT, PALETTES,
};
