//! Fast evaluation of Caputo fractional derivatives through
//! sum-of-exponentials kernel compression, with direct L1 and
//! Grünwald-Letnikov baselines and a 1D time-fractional diffusion solver.

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod pde;
pub mod properties;
pub mod quadrature;
pub mod reference;
pub mod schemes;
pub mod soe;
pub mod special;

pub use error::{Error, Result};
