use std::ops::{Add, Index, IndexMut, Mul, Sub};

use super::{hermitian_eig, CMatrix, C};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square real matrix, dense row-major. Used for covariance matrices and
/// symplectic transformations.
#[derive(Clone, Debug, PartialEq)]
pub struct RMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> RMatrix<T> {
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![T::one(); dim])
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Block-diagonal direct sum `a ⊕ b`.
    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        let n = a.dim + b.dim;
        Self::from_fn(n, |i, j| match (i < a.dim, j < a.dim) {
            (true, true) => a[(i, j)],
            (false, false) => b[(i - a.dim, j - a.dim)],
            _ => T::zero(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dimensions");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)] * x[j]).sum()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dimensions");
        self.data.iter().zip(&other.data).fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }

    pub fn symmetry_error(&self) -> T {
        self.max_abs_diff(&self.transpose())
    }

    pub fn symmetrize(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)]) * half)
    }

    /// Principal submatrix on the given (ordered) index list.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn to_complex(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.dim, |i, j| C::new(self[(i, j)], T::zero()))
    }

    /// Lower Cholesky factor; fails unless the matrix is positive definite.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.dim;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > T::zero()) {
                return Err(Error::Singular(format!("Cholesky pivot {j} is {d}")));
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }

    /// `ln det` of a symmetric positive definite matrix.
    pub fn log_det_spd(&self) -> Result<T> {
        let l = self.cholesky()?;
        Ok((0..self.dim).map(|i| l[(i, i)].ln()).sum::<T>() * T::lit(2.0))
    }

    /// Inverse of the lower Cholesky factor, by forward substitution.
    pub fn cholesky_inverse(&self) -> Result<Self> {
        let l = self.cholesky()?;
        let n = self.dim;
        let mut linv = Self::zeros(n);
        for j in 0..n {
            linv[(j, j)] = T::one() / l[(j, j)];
            for i in j + 1..n {
                let s: T = (j..i).map(|k| l[(i, k)] * linv[(k, j)]).sum();
                linv[(i, j)] = -s / l[(i, i)];
            }
        }
        Ok(linv)
    }

    /// Inverse and log-determinant of a symmetric positive definite matrix.
    pub fn spd_inverse_logdet(&self) -> Result<(Self, T)> {
        let linv = self.cholesky_inverse()?;
        let n = self.dim;
        let logdet = -(0..n).map(|i| linv[(i, i)].ln()).sum::<T>() * T::lit(2.0);
        // A⁻¹ = L⁻ᵀ L⁻¹.
        let mut inv = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let s: T = (i..n).map(|k| linv[(k, i)] * linv[(k, j)]).sum();
                inv[(i, j)] = s;
                inv[(j, i)] = s;
            }
        }
        Ok((inv, logdet))
    }

    /// Determinant by partial-pivot LU.
    pub fn det(&self) -> T {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = T::one();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[x * n + c].abs().partial_cmp(&a[y * n + c].abs()).unwrap())
                .unwrap();
            if a[p * n + c] == T::zero() {
                return T::zero();
            }
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a[c * n + c];
            det *= piv;
            for r in c + 1..n {
                let f = a[r * n + c] / piv;
                for j in c..n {
                    a[r * n + j] = a[r * n + j] - f * a[c * n + j];
                }
            }
        }
        det
    }

    /// Eigenvalues (ascending) and orthonormal eigenvectors (as columns) of a
    /// real symmetric matrix.
    pub fn sym_eig(&self) -> Result<(Vec<T>, Self)> {
        let eig = hermitian_eig(&self.to_complex())?;
        let vecs = RMatrix::from_fn(self.dim, |i, j| eig.vectors[(i, j)].re);
        Ok((eig.values, vecs))
    }

    /// Square root of a symmetric positive semidefinite matrix.
    pub fn psd_sqrt(&self) -> Result<Self> {
        let (vals, vecs) = self.sym_eig()?;
        if let Some(&min) = vals.first() {
            if min < -T::lit(super::PSD_CLAMP) {
                return Err(Error::NotPositive(min.to_f64().unwrap_or(f64::NAN)));
            }
        }
        let roots: Vec<T> = vals.iter().map(|&l| l.max(T::zero()).sqrt()).collect();
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| (0..n).map(|k| vecs[(i, k)] * roots[k] * vecs[(j, k)]).sum()))
    }
}

impl<T> Index<(usize, usize)> for RMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for RMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &RMatrix<T> {
    type Output = RMatrix<T>;
    fn add(self, rhs: Self) -> RMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix addition on mismatched dimensions");
        RMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect() }
    }
}

impl<T: Real> Sub for &RMatrix<T> {
    type Output = RMatrix<T>;
    fn sub(self, rhs: Self) -> RMatrix<T> {
        assert_eq!(self.dim, rhs.dim, "matrix subtraction on mismatched dimensions");
        RMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect() }
    }
}

impl<T: Real> Mul for &RMatrix<T> {
    type Output = RMatrix<T>;
    fn mul(self, rhs: Self) -> RMatrix<T> {
        self.matmul(rhs)
    }
}
