//! Maximal weighted connected subregions of score matrices.
//!
//! Finding the best connected region is NP-hard, so search uses the
//! four-corner dynamic program in [`dp_max_region`]. [`exact_mwcs`] is an
//! exhaustive solver for small matrices, [`is_dp_capturable`] classifies the
//! shapes the DP can return, and [`trst_to_mwcs`] builds matrices from
//! rectilinear Steiner tree instances.

mod bits;
mod dp;
mod exact;
mod shape;
mod trst;

pub use dp::{dp_corner_run, dp_max_region, Corner};
pub use exact::{exact_mwcs, DEFAULT_CELL_CAP};
pub use shape::{is_dp_capturable, sinks};
pub use trst::{rectilinear_steiner_length, trst_to_mwcs, TrstInstance};
