//! Optical trap, NV spin dynamics and the resulting friction on the
//! libration of a levitated nanodiamond.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod consts;
pub mod error;
pub mod ode;
pub mod params;
pub mod quad;
pub mod response;
pub mod rotor;
pub mod spin;
pub mod stats;
pub mod units;

pub use error::{Error, Result};
pub use params::{derive_trap, SystemConfig, TrapModel};
pub use units::RateConvention;
