//! Distinguishability measures: trace distance, Uhlmann fidelity and Bures
//! distance for density matrices, and their Gaussian counterparts computed
//! directly from first and second moments.

use crate::cv::{symplectic_form, GaussianState};
use crate::density::check_state;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigenvalues, nuclear_norm, real_eigenvalues, CMatrix, RMatrix, C, PSD_CLAMP};
use crate::scalar::Real;

/// Overshoot beyond `[0, 1]` that is still attributed to rounding.
pub const CLIP_SLACK: f64 = 1e-8;

/// States with `|1 - Tr ρ²|` below this are handled as pure.
const PURITY_TOL: f64 = 1e-13;

fn check_pair<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", rho.dim(), sigma.dim())));
    }
    check_state(rho)?;
    check_state(sigma)
}

fn clip_unit<T: Real>(x: T) -> Result<T> {
    let slack = T::lit(CLIP_SLACK);
    if x > T::one() + slack || x < -slack || x.is_nan() {
        return Err(Error::FidelityOvershoot(x.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(x.max(T::zero()).min(T::one()))
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> Result<T> {
    check_pair(rho, sigma)?;
    if rho == sigma {
        return Ok(T::zero());
    }
    let eig = hermitian_eig(&(rho - sigma))?;
    let d = eig.values.iter().map(|l| l.abs()).sum::<T>() * T::lit(0.5);
    clip_unit(d)
}

/// Entry-wise slack when confirming that a purity-flagged matrix really is
/// a rank-one projector.
const PROJECTOR_TOL: f64 = 1e-10;

/// If `rho` is pure to within rounding, a state vector `ψ` with `ρ = |ψ⟩⟨ψ|`.
fn pure_vector<T: Real>(rho: &CMatrix<T>) -> Option<Vec<C<T>>> {
    if (T::one() - rho.hermitian_square_trace()).abs() > T::lit(PURITY_TOL) {
        return None;
    }
    let n = rho.dim();
    let j = (0..n).max_by(|&a, &b| rho[(a, a)].re.partial_cmp(&rho[(b, b)].re).unwrap())?;
    let norm = rho[(j, j)].re.sqrt();
    let psi: Vec<C<T>> = (0..n).map(|i| rho[(i, j)] / norm).collect();
    let tol = T::lit(PROJECTOR_TOL);
    let projector = (0..n).all(|a| (0..n).all(|b| (rho[(a, b)] - psi[a] * psi[b].conj()).norm() <= tol));
    projector.then_some(psi)
}

fn check_psd_values<T: Real>(m: &CMatrix<T>) -> Result<()> {
    let min = hermitian_eigenvalues(m)?.first().copied().unwrap_or_else(T::zero);
    if min < -T::lit(PSD_CLAMP) {
        return Err(Error::NotPositive(min.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `Tr √(√ρ σ √ρ)`.
pub fn uhlmann_fidelity<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> Result<T> {
    check_pair(rho, sigma)?;
    if rho == sigma {
        check_psd_values(rho)?;
        return Ok(T::one());
    }
    let f = match (pure_vector(rho), pure_vector(sigma)) {
        (Some(a), Some(b)) => dot(&a, &b).norm(),
        (Some(psi), None) => {
            check_psd_values(sigma)?;
            sigma.expectation(&psi).re.max(T::zero()).sqrt()
        }
        (None, Some(psi)) => {
            check_psd_values(rho)?;
            rho.expectation(&psi).re.max(T::zero()).sqrt()
        }
        (None, None) => mixed_fidelity(rho, sigma)?,
    };
    clip_unit(f)
}

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Columns `√λ_k v_k` of a factor `A` with `ρ = A A†`, restricted to the
/// numerical support.
pub(crate) fn support_factor<T: Real>(rho: &CMatrix<T>) -> Result<Vec<Vec<C<T>>>> {
    let n = rho.dim();
    let eig = hermitian_eig(rho)?;
    eig.check_psd(T::lit(PSD_CLAMP))?;
    let lmax = eig.values.last().copied().unwrap_or_else(T::zero);
    let floor = T::epsilon() * T::lit(n as f64) * lmax;
    Ok((0..n)
        .filter(|&k| eig.values[k] > floor)
        .map(|k| {
            let root = eig.values[k].sqrt();
            eig.vector(k).into_iter().map(|x| x * root).collect()
        })
        .collect())
}

/// `F = ‖A†B‖₁` for factorizations `ρ = AA†`, `σ = BB†`.
fn mixed_fidelity<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> Result<T> {
    let a = support_factor(rho)?;
    let b = support_factor(sigma)?;
    // The smaller factor indexes the columns of the overlap matrix.
    let (rows, cols) = if a.len() >= b.len() { (&a, &b) } else { (&b, &a) };
    let overlap = cols.iter().map(|c| rows.iter().map(|r| dot(r, c)).collect()).collect();
    nuclear_norm(overlap)
}

/// `√(2(1 − F))`, with `1 − F` floored at zero.
pub fn bures_from_fidelity<T: Real>(f: T) -> T {
    (T::lit(2.0) * (T::one() - f).max(T::zero())).sqrt()
}

pub fn bures_distance<T: Real>(rho: &CMatrix<T>, sigma: &CMatrix<T>) -> Result<T> {
    uhlmann_fidelity(rho, sigma).map(bures_from_fidelity)
}

/// Uhlmann fidelity of two Gaussian states.
///
/// Modes in which either state is vacuum, after bringing it to Williamson
/// normal form, are projected out exactly: `F(τ ⊗ |0⟩⟨0|, σ) = √p F(τ, σ̂)`
/// with `p` the vacuum weight of `σ` and `σ̂` its normalized conditional
/// state. The closed form through `V_aux` is only evaluated on what remains,
/// where every auxiliary symplectic eigenvalue is clear of `½`; at `½` it
/// turns rounding of order ε into errors of order √ε.
pub fn gaussian_fidelity<T: Real>(g1: &GaussianState<T>, g2: &GaussianState<T>) -> Result<T> {
    if g1.n_modes() != g2.n_modes() {
        return Err(Error::DimensionMismatch(format!("{} vs {} modes", g1.n_modes(), g2.n_modes())));
    }
    g1.check_physical()?;
    g2.check_physical()?;
    if g1 == g2 {
        return Ok(T::one());
    }
    let delta: Vec<T> = g1.mean().iter().zip(g2.mean()).map(|(a, b)| *a - *b).collect();
    let mut pair = Moments { a: g1.cov().clone(), b: g2.cov().clone(), delta };
    let mut log_f = T::zero();
    let mut idle_passes = 0;
    while pair.a.dim() > 0 && idle_passes < 2 {
        match pair.project_vacuum_modes()? {
            Some(log_weight) => {
                log_f += T::lit(0.5) * log_weight;
                idle_passes = 0;
            }
            None => idle_passes += 1,
        }
        // Fidelity is symmetric, so alternate which state is reduced.
        std::mem::swap(&mut pair.a, &mut pair.b);
    }
    if pair.a.dim() > 0 {
        log_f += pair.mixed_log_fidelity()?;
    }
    clip_unit(log_f.exp())
}

/// Symplectic eigenvalues within this distance of `½` count as vacuum.
const VACUUM_MODE_TOL: f64 = 1e-12;

/// Covariances of two states and the difference of their means.
struct Moments<T> {
    a: RMatrix<T>,
    b: RMatrix<T>,
    delta: Vec<T>,
}

impl<T: Real> Moments<T> {
    /// Brings `a` to Williamson form and projects its vacuum modes out of
    /// both states. Returns the log vacuum weight of `b`, or `None` when `a`
    /// has no vacuum mode.
    fn project_vacuum_modes(&mut self) -> Result<Option<T>> {
        let n = self.a.dim() / 2;
        let root_inv = self.a.cholesky_inverse()?;
        let omega = symplectic_form::<T>(n);
        let k = &(&root_inv * &omega) * &root_inv.transpose();
        // i·K is Hermitian with spectrum ±1/ν; an eigenvector x + iy of 1/ν
        // gives K y = -x/ν and K x = y/ν.
        let h = CMatrix::from_fn(2 * n, |i, j| C::new(T::zero(), k[(i, j)]));
        let eig = hermitian_eig(&h)?;
        let half = T::lit(0.5);
        let nu: Vec<T> = eig.values[n..].iter().map(|&mu| T::one() / mu).collect();
        let is_vacuum = |v: T| v - half <= T::tol(VACUUM_MODE_TOL);
        let vacuum = nu.iter().filter(|&&v| is_vacuum(v)).count();
        if vacuum == 0 {
            return Ok(None);
        }

        // Rows of S⁻¹ = T Wᵀ L⁻¹ with a = L Lᵀ: mixed modes first, vacuum modes last.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&j| is_vacuum(nu[j]));
        let sqrt2 = T::lit(2.0).sqrt();
        let mut rows = Vec::with_capacity(2 * n);
        for &j in &order {
            let col = n + j;
            let scale = sqrt2 * nu[j].sqrt();
            let q1: Vec<T> = (0..2 * n).map(|i| eig.vectors[(i, col)].im).collect();
            let q2: Vec<T> = (0..2 * n).map(|i| eig.vectors[(i, col)].re).collect();
            for q in [q1, q2] {
                rows.push((0..2 * n).map(|c| scale * (0..2 * n).map(|i| q[i] * root_inv[(i, c)]).sum::<T>()).collect::<Vec<T>>());
            }
        }
        let s_inv = RMatrix::from_fn(2 * n, |i, j| rows[i][j]);
        let b = &(&s_inv * &self.b) * &s_inv.transpose();
        let delta = s_inv.apply(&self.delta);

        let kept = 2 * (n - vacuum);
        let (pa, pb) = ((0..kept).collect::<Vec<_>>(), (kept..2 * n).collect::<Vec<_>>());
        let shifted = RMatrix::from_fn(pb.len(), |i, j| b[(pb[i], pb[j])] + if i == j { half } else { T::zero() });
        let (inv, logdet) = shifted
            .spd_inverse_logdet()
            .map_err(|e| Error::Singular(format!("vacuum block is not invertible ({e})")))?;
        let db: Vec<T> = pb.iter().map(|&i| delta[i]).collect();
        let inv_db = inv.apply(&db);
        let quad: T = db.iter().zip(&inv_db).map(|(x, y)| *x * *y).sum();
        // b_AB Σ⁻¹ for the conditional moments.
        let gain: Vec<Vec<T>> = pa
            .iter()
            .map(|&i| (0..pb.len()).map(|l| (0..pb.len()).map(|m| b[(i, pb[m])] * inv[(m, l)]).sum()).collect())
            .collect();
        self.b = RMatrix::from_fn(kept, |i, j| {
            b[(i, j)] - (0..pb.len()).map(|l| gain[i][l] * b[(pb[l], j)]).sum::<T>()
        });
        self.delta = (0..kept).map(|i| delta[i] - (0..pb.len()).map(|l| gain[i][l] * db[l]).sum::<T>()).collect();
        let diag: Vec<T> = order[..n - vacuum].iter().flat_map(|&j| [nu[j], nu[j]]).collect();
        self.a = RMatrix::from_diag(&diag);
        Ok(Some(-half * quad - half * logdet))
    }

    /// Closed form through the auxiliary matrix
    /// `V_aux = Ωᵀ (σ₁ + σ₂)⁻¹ (Ω/4 + σ₂ Ω σ₁)`.
    fn mixed_log_fidelity(&self) -> Result<T> {
        let n = self.a.dim() / 2;
        let omega = symplectic_form::<T>(n);
        let sum = &self.a + &self.b;
        let (inv, logdet) = sum
            .spd_inverse_logdet()
            .map_err(|e| Error::Singular(format!("σ₁ + σ₂ is not invertible ({e})")))?;
        let quarter = T::lit(0.25);
        let inner = &omega.scale(quarter) + &(&(&self.b * &omega) * &self.a);
        let vaux = &(&omega.transpose() * &inv) * &inner;
        // V_aux is not symmetric; its ν come from the ±iν spectrum of V_aux Ω.
        let nu = aux_spectrum(&(&vaux * &omega))?;
        let (two, four) = (T::lit(2.0), T::lit(4.0));
        let log_ftot: T = nu
            .iter()
            .map(|&v| T::lit(0.5) * (two * v + (four * v * v - T::one()).max(T::zero()).sqrt()).ln())
            .sum();
        let quad: T = self.delta.iter().zip(inv.apply(&self.delta)).map(|(a, b)| *a * b).sum();
        Ok(log_ftot - quarter * logdet - quarter * quad)
    }
}

pub fn gaussian_bures<T: Real>(g1: &GaussianState<T>, g2: &GaussianState<T>) -> Result<T> {
    gaussian_fidelity(g1, g2).map(bures_from_fidelity)
}

/// The `n` symplectic eigenvalues of a real symmetric positive semidefinite
/// `2n × 2n` matrix, ascending.
pub fn symplectic_spectrum<T: Real>(m: &RMatrix<T>) -> Result<Vec<T>> {
    let n = m.dim() / 2;
    let omega = symplectic_form::<T>(n);
    // K = Lᵀ Ω L with M = L Lᵀ is similar to Ω M; the square root is only
    // needed when M is singular.
    let k = match m.cholesky() {
        Ok(l) => &(&l.transpose() * &omega) * &l,
        Err(_) => {
            let root = m.psd_sqrt()?;
            &(&root * &omega) * &root
        }
    };
    // i·K is Hermitian for real antisymmetric K; its spectrum is ±ν.
    let h = CMatrix::from_fn(m.dim(), |i, j| C::new(T::zero(), k[(i, j)]));
    let values = hermitian_eigenvalues(&h)?;
    Ok(values[n..].to_vec())
}

/// Tolerated real part, relative to the largest modulus, of an eigenvalue
/// of `V_aux Ω` that should be purely imaginary.
const AUX_REAL_TOL: f64 = 1e-8;

/// The moduli `ν_k` of the conjugate pairs `±iν_k` forming the spectrum of `k`.
fn aux_spectrum<T: Real>(k: &RMatrix<T>) -> Result<Vec<T>> {
    let values = real_eigenvalues(k)?;
    let scale = values.iter().map(|z| z.norm()).fold(T::one(), T::max);
    if let Some(z) = values.iter().find(|z| z.re.abs() > T::lit(AUX_REAL_TOL) * scale) {
        return Err(Error::Numerical(format!("auxiliary spectrum has a real part {:e}", z.re)));
    }
    let mut mods: Vec<T> = values.iter().map(|z| z.im.abs()).collect();
    mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(mods.chunks(2).map(|pair| pair.iter().copied().sum::<T>() / T::lit(pair.len() as f64)).collect())
}
