//! Polar-coordinate representation of random Pareto fronts.
//!
//! A front is stored as a reference vector `eta` plus one projected length per
//! direction of a fixed grid on the positive unit sphere. That turns front
//! algebra, averaging, quantiles and extreme-value approximations into
//! ordinary operations on length vectors.

pub mod error;
pub mod evt;
pub mod io;
pub mod numeric;
pub mod ops;
pub mod polar;
pub mod projection;
pub mod stats;
pub mod workflows;

pub use error::{Error, Result};
