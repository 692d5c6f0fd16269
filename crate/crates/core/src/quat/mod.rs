//! Quaternion algebra: scalars, dense matrices, the complex adjoint and QSVD.

mod adjoint;
pub mod io;
mod matrix;
mod scalar;
mod svd;

pub use adjoint::{from_complex_adjoint, to_complex_adjoint, ComplexMatrix};
pub use matrix::{conj_transpose, dist, frobenius_norm, inner, qmatmul, QMatrix};
pub use scalar::{qmul, Quaternion};
pub use svd::{qsvd, qsvd_with, rank, singular_values, unitary_defect, QsvdOptions, QsvdResult};

pub(crate) use svd::thin_spectral;
