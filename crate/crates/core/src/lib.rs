//! Closed-form hand-eye calibration for `AX = XB` and `AX = YB`.
//!
//! The solvers cover three rotation parametrizations (axis-angle,
//! quaternion, Kronecker) and several equation forms, including solvers
//! that use the translation equation alone.

pub mod cli;
pub mod error;
pub mod io;
mod linalg;
pub mod pipeline;
pub mod recovery;
pub mod se3;
pub mod sim;
pub mod solvers;

pub use error::{Error, ErrorClass, Result};
