//! Periodic grids, fields, transforms and norms.

mod field;
mod grid;
mod norms;
mod ops;
pub mod snapshot;

pub use field::{ScalarField, VectorField};
pub use grid::SpectralGrid;
pub(crate) use grid::ensure_same_grid;
pub use norms::{
    bessel_table, inner_product, integrate, lq_norm, lq_norm_vector, lq_norm_with, oversampled,
    sobolev_norm, spectral_energy,
};
pub use ops::{
    advect, curl, dealias, dealiased_product, derivative_table, divergence, forward_transform,
    gradient, inverse_transform, partial_derivative, tail_energy_fraction,
};
pub(crate) use ops::dealias_in_place;
