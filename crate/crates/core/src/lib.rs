//! Numerical toolkit for time-fractional diffusion built on the Wright
//! function family.

pub mod error;
pub mod fraccalc;
pub mod gamma;
pub mod ggbm;
pub mod greens;
pub mod grid;
pub mod quad;
pub mod specfun;
pub mod verify;
pub mod xform;

pub use error::{Error, Result};
pub use grid::GridFunction;
