//! Sparse low-rank quaternion approximation for color image restoration.
//!
//! A color image is carried as a pure quaternion matrix (R, G, B in the
//! i, j, k parts). Denoising minimizes a smoothed nonconvex spectral
//! surrogate plus a Huber sparsity term on an orthogonal transform of the
//! image, solved by proximal linearized ADMM. Inpainting uses the
//! noise-free variant that moves the low-rank term into the transform
//! domain.
//!
//! Modules:
//! - [`quat`]: quaternion scalars, dense quaternion matrices, QSVD
//! - [`transforms`]: the orthogonal transform and its adjoint
//! - [`surrogates`]: rank surrogates and the Huber penalty
//! - [`prox`]: the spectral proximal operator
//! - [`solvers`]: PL-ADMM, PL-ADMM-NF, merit functions, parameter checks
//! - [`nss`]: non-local self-similarity patch pipeline
//! - [`imaging`]: encoding, degradation, metrics, file formats
//! - [`pipeline`]: image-level restoration
//! - [`presets`]: named parameter sets

pub mod error;
pub mod imaging;
pub mod nss;
pub mod pipeline;
pub mod presets;
pub mod prox;
pub mod quat;
pub mod solvers;
pub mod surrogates;
pub mod transforms;

pub use error::{QslrError, Result};
pub use quat::{QMatrix, QsvdResult, Quaternion};
