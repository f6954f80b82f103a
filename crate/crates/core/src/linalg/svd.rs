//! Singular values by one-sided (Hestenes) Jacobi rotations.
//!
//! The singular values come out as column norms, so small ones keep full
//! relative accuracy instead of being recovered as square roots of tiny
//! eigenvalues.

use super::C;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 60;

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn norm_sqr<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Singular values of the matrix whose columns are `cols` (all of equal
/// length), in no particular order. One value per column.
pub fn singular_values<T: Real>(mut cols: Vec<Vec<C<T>>>) -> Result<Vec<T>> {
    let n = cols.len();
    let eps = T::epsilon();
    // Heavy columns first; rotations then mostly move weight downhill.
    cols.sort_by(|a, b| norm_sqr(b).partial_cmp(&norm_sqr(a)).unwrap_or(std::cmp::Ordering::Equal));
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        // Refreshed every sweep, so a sweep without rotations saw exact norms.
        let mut norms: Vec<T> = cols.iter().map(|c| norm_sqr(c)).collect();
        for p in 0..n {
            for q in p + 1..n {
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                let negligible = |a: T, b: T| g == T::zero() || g <= eps * (a * b).sqrt();
                if negligible(norms[p], norms[q]) {
                    continue;
                }
                // The running norms drift for small columns; confirm exactly.
                let (alpha, beta) = (norm_sqr(&cols[p]), norm_sqr(&cols[q]));
                if negligible(alpha, beta) {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    // Rotate against the phase-aligned second column.
                    let yq = *y * phase.conj();
                    let xn = *x * c - yq * s;
                    *y = *x * s + yq * c;
                    *x = xn;
                }
                norms[p] = alpha - t * g;
                norms[q] = beta + t * g;
            }
        }
        if !rotated {
            return Ok(cols.iter().map(|c| norm_sqr(c).sqrt()).collect());
        }
    }
    Err(Error::NotConverged(MAX_SWEEPS))
}

/// Trace norm `Σ σ_i` of the matrix with the given columns.
pub fn nuclear_norm<T: Real>(cols: Vec<Vec<C<T>>>) -> Result<T> {
    Ok(singular_values(cols)?.into_iter().sum())
}
