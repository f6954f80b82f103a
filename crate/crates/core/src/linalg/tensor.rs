use super::{CMatrix, C};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Factorization of a Hilbert space into an ordered list of subsystems.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    dims: Vec<usize>,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter("subsystem dimension must be positive".into()));
        }
        Ok(Self { dims })
    }

    /// `n` copies of a `d`-level subsystem.
    pub fn uniform(d: usize, n: usize) -> Self {
        Self { dims: vec![d; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Flat-index stride of each subsystem (subsystem 0 most significant).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// The space left after keeping only `keep` (in the given order).
    pub fn subspace(&self, keep: &[usize]) -> Result<Self> {
        for &k in keep {
            self.check_index(k)?;
        }
        Ok(Self { dims: keep.iter().map(|&k| self.dims[k]).collect() })
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self { dims: self.dims.iter().chain(&other.dims).copied().collect() }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dims.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.dims.len() });
        }
        Ok(())
    }

    /// Flat offsets of every multi-index over the listed subsystems, with
    /// the remaining digits set to zero.
    fn offsets(&self, subsystems: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &s in subsystems {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[s]);
            for &o in &offsets {
                for digit in 0..self.dims[s] {
                    next.push(o + digit * strides[s]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

/// Kronecker product; the `(i·b.dim + k, j·b.dim + l)` entry is `a[i,j]·b[k,l]`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = CMatrix::zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            let aij = a[(i, j)];
            if aij.re == T::zero() && aij.im == T::zero() {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Traces out the subsystems listed in `drop`; the survivors keep their
/// relative order.
pub fn partial_trace<T: Real>(m: &CMatrix<T>, space: &TensorSpace, drop: &[usize]) -> Result<CMatrix<T>> {
    if space.total_dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "space of dimension {} labels a {}-dimensional matrix",
            space.total_dim(),
            m.dim()
        )));
    }
    for &d in drop {
        space.check_index(d)?;
    }
    let keep: Vec<usize> = (0..space.len()).filter(|i| !drop.contains(i)).collect();
    let mut dropped: Vec<usize> = (0..space.len()).filter(|i| drop.contains(i)).collect();
    dropped.dedup();
    let keep_off = space.offsets(&keep);
    let drop_off = space.offsets(&dropped);
    let n = keep_off.len();
    let mut out = CMatrix::zeros(n);
    for (a, &ra) in keep_off.iter().enumerate() {
        for (b, &cb) in keep_off.iter().enumerate() {
            let mut s = C::new(T::zero(), T::zero());
            for &d in &drop_off {
                s += m[(ra + d, cb + d)];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

fn check_two_site<T: Real>(u: &CMatrix<T>, space: &TensorSpace, (i, j): (usize, usize)) -> Result<()> {
    space.check_index(i)?;
    space.check_index(j)?;
    if i == j {
        return Err(Error::InvalidParameter("two-site operator needs distinct sites".into()));
    }
    let (di, dj) = (space.dims()[i], space.dims()[j]);
    if u.dim() != di * dj {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional two-site operator on sites of dimension {di} and {dj}",
            u.dim()
        )));
    }
    Ok(())
}

/// Full-space matrix acting as `u` on sites `(i, j)` (with `i` the more
/// significant factor of `u`) and as the identity elsewhere.
pub fn embed_two_site<T: Real>(u: &CMatrix<T>, space: &TensorSpace, sites: (usize, usize)) -> Result<CMatrix<T>> {
    check_two_site(u, space, sites)?;
    let (i, j) = sites;
    let strides = space.strides();
    let dims = space.dims();
    let rest: Vec<usize> = (0..space.len()).filter(|&k| k != i && k != j).collect();
    let rest_off = space.offsets(&rest);
    let dj = dims[j];
    let mut out = CMatrix::zeros(space.total_dim());
    for &base in &rest_off {
        for r in 0..u.dim() {
            let row = base + (r / dj) * strides[i] + (r % dj) * strides[j];
            for c in 0..u.dim() {
                let col = base + (c / dj) * strides[i] + (c % dj) * strides[j];
                out[(row, col)] = u[(r, c)];
            }
        }
    }
    Ok(out)
}

/// `U ρ U†` where `U` is `u` embedded on `sites`, without forming `U`.
pub fn apply_two_site<T: Real>(
    rho: &CMatrix<T>,
    u: &CMatrix<T>,
    space: &TensorSpace,
    sites: (usize, usize),
) -> Result<CMatrix<T>> {
    check_two_site(u, space, sites)?;
    if space.total_dim() != rho.dim() {
        return Err(Error::DimensionMismatch("state does not match its tensor space".into()));
    }
    let (i, j) = sites;
    let strides = space.strides();
    let dims = space.dims();
    let rest: Vec<usize> = (0..space.len()).filter(|&k| k != i && k != j).collect();
    let rest_off = space.offsets(&rest);
    let local: Vec<usize> = (0..u.dim())
        .map(|r| (r / dims[j]) * strides[i] + (r % dims[j]) * strides[j])
        .collect();
    let left = |m: &CMatrix<T>, op: &CMatrix<T>| -> CMatrix<T> {
        let n = m.dim();
        let mut out = CMatrix::zeros(n);
        let mut buf = vec![C::new(T::zero(), T::zero()); local.len()];
        for &base in &rest_off {
            for col in 0..n {
                for (b, &l) in buf.iter_mut().zip(&local) {
                    *b = m[(base + l, col)];
                }
                for (r, &lr) in local.iter().enumerate() {
                    let mut s = C::new(T::zero(), T::zero());
                    for (c, &bc) in buf.iter().enumerate() {
                        let w = op[(r, c)];
                        if w.re != T::zero() || w.im != T::zero() {
                            s += w * bc;
                        }
                    }
                    out[(base + lr, col)] = s;
                }
            }
        }
        out
    };
    // U ρ U† = (U (U ρ)†)†
    let half = left(rho, u);
    Ok(left(&half.adjoint(), u).adjoint())
}
