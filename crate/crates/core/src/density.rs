//! Density matrices over a labelled tensor-product space.

use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, CMatrix, TensorSpace, C};
use crate::scalar::Real;

/// Tolerance on unit trace and Hermiticity for a matrix to count as a state.
pub const STATE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    space: TensorSpace,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Wraps `matrix` after checking it is Hermitian with unit trace.
    pub fn new(space: TensorSpace, matrix: CMatrix<T>) -> Result<Self> {
        if space.total_dim() != matrix.dim() {
            return Err(Error::DimensionMismatch(format!(
                "space of dimension {} for a {}-dimensional matrix",
                space.total_dim(),
                matrix.dim()
            )));
        }
        check_state(&matrix)?;
        Ok(Self { space, matrix })
    }

    /// Single-subsystem state.
    pub fn single(matrix: CMatrix<T>) -> Result<Self> {
        let space = TensorSpace::new(vec![matrix.dim()])?;
        Self::new(space, matrix)
    }

    pub fn pure(space: TensorSpace, psi: &[C<T>]) -> Result<Self> {
        Self::new(space, CMatrix::projector(psi))
    }

    pub(crate) fn from_parts_unchecked(space: TensorSpace, matrix: CMatrix<T>) -> Self {
        Self { space, matrix }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> T {
        self.matrix.hermitian_square_trace()
    }

    /// Reduced state on `keep` (in the given order of the remaining
    /// subsystems, which is always ascending).
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        for &k in keep {
            if k >= self.space.len() {
                return Err(Error::IndexOutOfRange { index: k, len: self.space.len() });
            }
        }
        if keep.len() == self.space.len() {
            return Ok(self.clone());
        }
        let drop: Vec<usize> = (0..self.space.len()).filter(|i| !keep.contains(i)).collect();
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        let matrix = partial_trace(&self.matrix, &self.space, &drop)?;
        Ok(Self { space: self.space.subspace(&sorted)?, matrix })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { space: self.space.concat(&other.space), matrix: kron(&self.matrix, &other.matrix) }
    }

    /// Hermitizes and restores unit trace.
    pub fn repaired(&self) -> Self {
        let h = self.matrix.hermitize();
        let tr = h.trace().re;
        Self { space: self.space.clone(), matrix: h.scale_real(T::one() / tr) }
    }
}

pub(crate) fn check_state<T: Real>(m: &CMatrix<T>) -> Result<()> {
    let herm = m.hermiticity_error();
    if herm > T::tol(STATE_TOL) {
        return Err(Error::NotHermitian(herm.to_f64().unwrap_or(f64::NAN)));
    }
    let tr = m.trace().re;
    if (tr - T::one()).abs() > T::tol(STATE_TOL) {
        return Err(Error::NotNormalized(tr.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}
