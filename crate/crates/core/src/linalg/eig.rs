use super::{CMatrix, C};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Matrices up to this dimension go through cyclic Jacobi; larger ones
/// through Householder tridiagonalization and implicit QL.
pub const JACOBI_MAX_DIM: usize = 16;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-12;
const QL_MAX_ITER_PER_VALUE: usize = 60;

/// Spectral decomposition `A = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: CMatrix<T>,
}

impl<T: Real> HermitianEig<T> {
    /// `V diag(f(λ)) V†`.
    pub fn reconstruct(&self, f: impl Fn(T) -> C<T>) -> CMatrix<T> {
        let n = self.values.len();
        let fl: Vec<C<T>> = self.values.iter().map(|&l| f(l)).collect();
        // W = V diag(f), then W V†.
        let mut out = CMatrix::zeros(n);
        for k in 0..n {
            if fl[k].re == T::zero() && fl[k].im == T::zero() {
                continue;
            }
            for i in 0..n {
                let wik = self.vectors[(i, k)] * fl[k];
                if wik.re == T::zero() && wik.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += wik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    /// Fails when the smallest eigenvalue lies below `-clamp`.
    pub fn check_psd(&self, clamp: T) -> Result<()> {
        let min = self.min_value();
        if min < -clamp {
            return Err(Error::NotPositive(min.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    /// Column `j` of `V` as an owned vector.
    pub fn vector(&self, j: usize) -> Vec<C<T>> {
        (0..self.values.len()).map(|i| self.vectors[(i, j)]).collect()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is Hermitized before decomposition; callers are expected to
/// pass matrices that are Hermitian up to rounding.
pub fn hermitian_eig<T: Real>(m: &CMatrix<T>) -> Result<HermitianEig<T>> {
    if m.dim() <= JACOBI_MAX_DIM {
        jacobi_eig(m)
    } else {
        tridiagonal_eig(m)
    }
}

fn sorted<T: Real>(values: Vec<T>, vectors_t: Vec<Vec<C<T>>>) -> HermitianEig<T> {
    // vectors_t[j] holds eigenvector j.
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&k| values[k]).collect();
    let vectors = CMatrix::from_fn(n, |i, j| vectors_t[order[j]][i]);
    HermitianEig { values: vals, vectors }
}

fn off_diagonal_norm<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn jacobi_eig<T: Real>(m: &CMatrix<T>) -> Result<HermitianEig<T>> {
    let n = m.dim();
    let mut a = m.hermitize();
    let mut v = CMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let tol = T::tol(JACOBI_OFF_TOL) * scale;
    let two = T::lit(2.0);

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                // e^{iφ} as a ratio, so that real input stays exactly real.
                let phase = apq / mag;
                let phase_c = phase.conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (two * mag);
                let t = if theta.abs() > T::lit(1e150) {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let new_kp = akp * c - akq * phase_c * s;
                    let new_kq = akp * s + akq * phase_c * c;
                    a[(k, p)] = new_kp;
                    a[(k, q)] = new_kq;
                    a[(p, k)] = new_kp.conj();
                    a[(q, k)] = new_kq.conj();
                }
                a[(p, p)] = C::new(app - t * mag, T::zero());
                a[(q, q)] = C::new(aqq + t * mag, T::zero());
                a[(p, q)] = C::new(T::zero(), T::zero());
                a[(q, p)] = C::new(T::zero(), T::zero());

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * phase_c * s;
                    v[(k, q)] = vkp * s + vkq * phase_c * c;
                }
            }
        }
    }
    if !converged {
        if off_diagonal_norm(&a) > tol {
            return Err(Error::NotConverged(JACOBI_MAX_SWEEPS));
        }
    }
    let values: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let vectors_t: Vec<Vec<C<T>>> = (0..n).map(|j| (0..n).map(|i| v[(i, j)]).collect()).collect();
    Ok(sorted(values, vectors_t))
}

/// Householder reduction to real symmetric tridiagonal form followed by
/// implicit-shift QL iterations.
pub fn tridiagonal_eig<T: Real>(m: &CMatrix<T>) -> Result<HermitianEig<T>> {
    let (mut d, mut e, mut zt) = tridiagonalize(m, true);
    tql2(&mut d, &mut e, &mut zt)?;
    Ok(sorted(d, zt))
}

/// Eigenvalues only, ascending. Skips all eigenvector work.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<T>> {
    if m.dim() <= JACOBI_MAX_DIM {
        return Ok(jacobi_eig(m)?.values);
    }
    let (mut d, mut e, mut zt) = tridiagonalize(m, false);
    tql2(&mut d, &mut e, &mut zt)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(d)
}

/// Diagonal, off-diagonal and (if requested) transposed eigenvector basis
/// of the tridiagonal form.
#[allow(clippy::type_complexity)]
fn tridiagonalize<T: Real>(m: &CMatrix<T>, accumulate: bool) -> (Vec<T>, Vec<T>, Vec<Vec<C<T>>>) {
    let n = m.dim();
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    let mut a = m.hermitize();
    let mut q = CMatrix::<T>::identity(if accumulate { n } else { 0 });
    // Column tails below the rounding level of the whole matrix are already
    // reduced; reflecting them would divide by a subnormal norm.
    let negligible = (T::epsilon() * a.max_abs()).powi(2);

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<C<T>> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let tail: T = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail <= negligible {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let x0 = x[0].norm();
        let phase = if x0 == T::zero() { one } else { x[0] / x0 };
        let mut u = x;
        u[0] += phase * xnorm;
        let unorm2: T = u.iter().map(|z| z.norm_sqr()).sum();
        let beta = T::lit(2.0) / unorm2;

        // p = β B u over the trailing block B = a[k+1.., k+1..].
        let mut p = vec![zero; len];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = a.row(k + 1 + i);
            let mut s = zero;
            for (j, &uj) in u.iter().enumerate() {
                s += row[k + 1 + j] * uj;
            }
            *pi = s * beta;
        }
        let upp: T = u.iter().zip(&p).map(|(ui, pi)| (ui.conj() * pi).re).sum();
        let kk = upp * beta * T::lit(0.5);
        let w: Vec<C<T>> = p.iter().zip(&u).map(|(&pi, &ui)| pi - ui * kk).collect();
        for i in 0..len {
            let ui = u[i];
            let wi = w[i];
            let base = (k + 1 + i) * n + k + 1;
            let row = &mut a.as_mut_slice()[base..base + len];
            for j in 0..len {
                row[j] -= ui * w[j].conj() + wi * u[j].conj();
            }
        }
        let sub = -(phase * xnorm);
        a[(k + 1, k)] = sub;
        a[(k, k + 1)] = sub.conj();
        for i in k + 2..n {
            a[(i, k)] = zero;
            a[(k, i)] = zero;
        }

        // Q ← Q P on columns k+1..
        for r in (0..n).filter(|_| accumulate) {
            let base = r * n + k + 1;
            let row = &mut q.as_mut_slice()[base..base + len];
            let mut s = zero;
            for (qj, uj) in row.iter().zip(&u) {
                s += *qj * *uj;
            }
            let s = s * beta;
            for (qj, uj) in row.iter_mut().zip(&u) {
                *qj -= s * uj.conj();
            }
        }
    }

    // Rotate the complex off-diagonal onto the positive real axis.
    let d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    let mut phases = vec![one; n];
    for k in 0..n.saturating_sub(1) {
        let t = a[(k + 1, k)];
        let mag = t.norm();
        e[k] = mag;
        phases[k + 1] = if mag == T::zero() { phases[k] } else { phases[k] * (t / mag) };
    }
    // zt[j] is column j of Q·D, i.e. the running eigenvector j.
    let zt = if accumulate {
        (0..n).map(|j| (0..n).map(|i| q[(i, j)] * phases[j]).collect()).collect()
    } else {
        Vec::new()
    };
    (d, e, zt)
}

fn tql2<T: Real>(d: &mut [T], e: &mut [T], zt: &mut [Vec<C<T>>]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut f = T::zero();
    // Deflate against the scale of the whole matrix. A running maximum starts
    // at zero when leading rows vanish, and then treats rounding residue as
    // significant.
    let tst1 = d.iter().zip(e.iter()).map(|(a, b)| a.abs() + b.abs()).fold(T::zero(), T::max);
    for l in 0..n {
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER_PER_VALUE {
                    return Err(Error::NotConverged(iter));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if zt.is_empty() {
                        continue;
                    }
                    let (lo, hi) = zt.split_at_mut(i + 1);
                    let zi = &mut lo[i];
                    let zi1 = &mut hi[0];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hb = *b;
                        *b = *a * s + hb * c;
                        *a = *a * c - hb * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}
