//! Dyadic partition of unity, block operators, Besov/Sobolev/Lebesgue norms
//! and the Bony paraproduct calculus.

mod bony;
mod norms;
mod partition;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use bony::{block_commutator, paraproduct, remainder};
pub(crate) use norms::lr_sum;
pub use norms::{
    besov_from_l2_blocks, besov_norm, block_l2_norms, block_lp_norms, dyadic_block,
    inhomogeneous_block, lebesgue_norm, low_freq_cutoff, sobolev_norm, BesovParams, NormKind,
    NormReport,
};
pub use partition::{chi, phi, DyadicPartition, MIN_SHELLS, PHI_INNER, PHI_OUTER};

#[derive(Debug, Error)]
pub enum LpError {
    #[error("only {shells} dyadic shells fit on the grid, need {required}")]
    GridTooSmall { shells: usize, required: usize },
    #[error("dyadic index {j} outside [{lo}, {hi}]")]
    IndexOutOfRange { j: i32, lo: i32, hi: i32 },
    #[error("field grid differs from partition grid")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
