//! Finite-dimensional reductions of the dispersionless shallow-water system.

// NaN must fail range checks, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod closed_form;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod invariants;
pub mod numerics;
pub mod pde;
pub mod poisson;
pub mod report;
pub mod sampling;
pub mod series;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
