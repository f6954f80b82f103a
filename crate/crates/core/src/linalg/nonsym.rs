//! Eigenvalues of general real square matrices: Householder reduction to
//! upper Hessenberg form, then Francis double-shift QR.

use super::{RMatrix, C};
use crate::error::{Error, Result};
use crate::scalar::Real;

const QR_MAX_ITER_PER_VALUE: usize = 60;

/// Eigenvalues of a real matrix, in no particular order. Complex values
/// come in conjugate pairs.
pub fn real_eigenvalues<T: Real>(m: &RMatrix<T>) -> Result<Vec<C<T>>> {
    let n = m.dim();
    let mut h: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
    hessenberg(&mut h);
    let (d, e) = hqr(&mut h)?;
    Ok(d.into_iter().zip(e).map(|(re, im)| C::new(re, im)).collect())
}

fn hessenberg<T: Real>(h: &mut [Vec<T>]) {
    let n = h.len();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![T::zero(); n];
    for m in 1..high {
        let scale: T = (m..=high).map(|i| h[i][m - 1].abs()).sum();
        if scale == T::zero() {
            continue;
        }
        let mut hh = T::zero();
        for i in (m..=high).rev() {
            ort[i] = h[i][m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > T::zero() {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;
        for j in m..n {
            let f = (m..=high).rev().map(|i| ort[i] * h[i][j]).sum::<T>() / hh;
            for i in m..=high {
                h[i][j] -= f * ort[i];
            }
        }
        for row in h.iter_mut() {
            let f = (m..=high).rev().map(|j| ort[j] * row[j]).sum::<T>() / hh;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m][m - 1] = scale * g;
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr<T: Real>(h: &mut [Vec<T>]) -> Result<(Vec<T>, Vec<T>)> {
    let nn = h.len();
    let mut d = vec![T::zero(); nn];
    let mut e = vec![T::zero(); nn];
    if nn == 0 {
        return Ok((d, e));
    }
    let eps = T::epsilon();
    let half = T::lit(0.5);
    let mut exshift = T::zero();
    let mut norm = T::zero();
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[i][j].abs();
        }
    }

    let mut n = nn as isize - 1;
    let mut iter = 0;
    while n >= 0 {
        let nu = n as usize;
        // Look for a single small sub-diagonal element.
        let mut l = nu;
        while l > 0 {
            let mut s = h[l - 1][l - 1].abs() + h[l][l].abs();
            if s == T::zero() {
                s = norm;
            }
            if h[l][l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            d[nu] = h[nu][nu] + exshift;
            e[nu] = T::zero();
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            let w = h[nu][nu - 1] * h[nu - 1][nu];
            let p = (h[nu - 1][nu - 1] - h[nu][nu]) * half;
            let q = p * p + w;
            let mut z = q.abs().sqrt();
            let x = h[nu][nu] + exshift;
            if q >= T::zero() {
                z = if p >= T::zero() { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = if z != T::zero() { x - w / z } else { d[nu - 1] };
                e[nu - 1] = T::zero();
                e[nu] = T::zero();
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            let (mut p, mut q, mut r, mut s, mut z);
            let mut x = h[nu][nu];
            let mut y = h[nu - 1][nu - 1];
            let mut w = h[nu][nu - 1] * h[nu - 1][nu];

            // Exceptional shifts.
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[i][i] -= x;
                }
                s = h[nu][nu - 1].abs() + h[nu - 1][nu - 2].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            if iter == 30 {
                s = (y - x) * half;
                s = s * s + w;
                if s > T::zero() {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) * half + s);
                    for i in 0..=nu {
                        h[i][i] -= s;
                    }
                    exshift += s;
                    x = T::lit(0.964);
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > QR_MAX_ITER_PER_VALUE {
                return Err(Error::NotConverged(iter));
            }

            // Look for two consecutive small sub-diagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - r - s;
                r = h[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let lhs = h[m][m - 1].abs() * (q.abs() + r.abs());
                let rhs = eps * (p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[i][i - 2] = T::zero();
                if i > m + 2 {
                    h[i][i - 3] = T::zero();
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if notlast { h[k + 2][k - 1] } else { T::zero() };
                    x = p.abs() + q.abs() + r.abs();
                    // The bulge has already vanished at this column.
                    if x == T::zero() {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < T::zero() {
                    s = -s;
                }
                if s != T::zero() {
                    if k != m {
                        h[k][k - 1] = -s * x;
                    } else if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..nn {
                        let mut pj = h[k][j] + q * h[k + 1][j];
                        if notlast {
                            pj += r * h[k + 2][j];
                            h[k + 2][j] -= pj * z;
                        }
                        h[k][j] -= pj * x;
                        h[k + 1][j] -= pj * y;
                    }
                    for row in h.iter_mut().take(nu.min(k + 3) + 1) {
                        let mut pi = x * row[k] + y * row[k + 1];
                        if notlast {
                            pi += z * row[k + 2];
                            row[k + 2] -= pi * r;
                        }
                        row[k] -= pi;
                        row[k + 1] -= pi * q;
                    }
                }
            }
        }
    }
    Ok((d, e))
}
