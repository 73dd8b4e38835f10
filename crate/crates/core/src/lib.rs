//! Finite-difference WENO solver for the two-dimensional Euler equations on
//! Cartesian grids with embedded geometry.
//!
//! Ghost nodes outside the physical domain are filled by a weighted
//! least-squares extrapolation along the boundary normal, which keeps the
//! boundary treatment high order in smooth regions and degrades gracefully to
//! nearest-value extrapolation across discontinuities.

// Range checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod config;
pub mod driver;
pub mod error;
pub mod euler;
pub mod extrapolation;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod mesh;
pub mod solver;
pub mod weno;

pub use error::{Error, Result};
