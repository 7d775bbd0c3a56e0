//! Böttcher coordinates at superattracting fixed points: Ritt's root
//! iteration, Milnor's logarithmic lift, the series solution of the
//! resolvent equation, Böttcher's original scheme, and the escape rate.

mod chart;
mod escape;
mod gamelin;
mod germ;
mod milnor;
mod original;
mod ritt;

pub use chart::{sample_disk, ChartMethod, ChartParams, ChartSummary, CoordinateChart, ModelMap};
pub use escape::{escape_rate, ESCAPE_HORIZON, ESCAPE_N_MAX_DEFAULT};
pub use gamelin::{boettcher_coefficients, boettcher_series, series_chart, MIN_DISK, N_TERMS_DEFAULT, TAIL_TOLERANCE};
pub use germ::LocalGerm;
pub use milnor::{boettcher_milnor, MilnorLift};
pub use original::{boettcher_original, original_chart};
pub use ritt::{boettcher_ritt, ritt_chart, BRANCH_AMBIGUITY, N_MAX_DEFAULT, STEP_TOLERANCE};
