//! Dense matrices, SVD, Householder least squares, and the norm oracles the
//! rest of the crate is checked against.

mod matrix;
mod qr;
mod svd;

pub use matrix::{DenseMatrix, DenseVector};
pub use qr::qr_least_squares;
pub use svd::{nuclear_norm_oracle, spectral_norm, svd, SvdResult, RANK_TOLERANCE};

pub(crate) use matrix::{dot, norm2};
pub(crate) use qr::HouseholderQr;
