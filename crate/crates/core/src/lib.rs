//! Pseudo-spectral simulation and numerical analysis of the 2D fractional
//! Boussinesq system with zero diffusivity on the periodic torus.
//!
//! ```text
//! omega_t + Lambda^alpha omega + u . grad omega = d1 rho
//! rho_t + u . grad rho = 0
//! ```
//!
//! The solver runs either in the vorticity `omega` or in the modified
//! vorticity `zeta = omega - S rho`, with `S = d1 (I - Delta)^(-alpha/2)`.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod multipliers;
pub mod random;
pub mod run;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
