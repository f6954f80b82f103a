//! Small dense linear algebra over real and complex scalars.
//!
//! Everything here is sized for the problems this crate solves: a few
//! hundred rows at most, stored densely in row-major order.
//!
//! Subsystem ordering convention: in a [`TensorSpace`] the subsystem with
//! index 0 is the most significant digit of a flat basis index, matching
//! [`kron`]. For collision-model chains index 0 is the system and indices
//! `1..` are the retained ancillae ordered oldest to newest.

mod complex;
mod eig;
mod nonsym;
mod real;
mod svd;
mod tensor;

pub use complex::{CMatrix, C};
pub use eig::{hermitian_eig, hermitian_eigenvalues, jacobi_eig, tridiagonal_eig, HermitianEig, JACOBI_MAX_DIM};
pub use nonsym::real_eigenvalues;
pub use real::RMatrix;
pub use svd::{nuclear_norm, singular_values};
pub use tensor::{apply_two_site, embed_two_site, kron, partial_trace, TensorSpace};

use crate::error::Result;
use crate::scalar::Real;

/// Eigenvalues below this (absolute) are treated as genuine indefiniteness.
pub const PSD_CLAMP: f64 = 1e-10;

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything more negative
/// is rejected.
pub fn psd_sqrt<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    let eig = hermitian_eig(m)?;
    eig.check_psd(T::lit(PSD_CLAMP))?;
    Ok(eig.reconstruct(|l| C::new(l.max(T::zero()).sqrt(), T::zero())))
}

/// `exp(-i t h)` for Hermitian `h`, evaluated through its eigendecomposition.
pub fn expm_antihermitian<T: Real>(h: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let eig = hermitian_eig(h)?;
    Ok(eig.reconstruct(|l| {
        let phase = -(t * l);
        C::new(phase.cos(), phase.sin())
    }))
}
