//! Torus geometry, transforms, Fourier multipliers and dealiased products.

mod checkpoint;
pub(crate) mod fft;
mod field;
mod grid;
mod ops;
pub(crate) mod products;

use thiserror::Error;

pub use checkpoint::{decode, encode, read_checkpoint, write_checkpoint};
pub use field::{PhysicalField, SpectralField, REAL_TOLERANCE};
pub use grid::Grid;
pub use ops::{
    apply_laplacian, cutoff_leakage, forward_transform, heat_propagate, inverse_transform,
    partial_derivative, spectral_cutoff, IMAG_TOLERANCE,
};
pub(crate) use ops::{in_cutoff, to_physical_fast};
pub use products::{
    l4_fourth_power, pointwise_cross_with_laplacian, pointwise_cubic, product, Bilinear,
};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field flagged real has imaginary residue {residue:e}")]
    NonRealOutput { residue: f64 },
    #[error("non-finite value in field")]
    NonFinite,
    #[error("expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
