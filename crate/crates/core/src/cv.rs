//! Continuous-variable Gaussian collision model.
//!
//! Conventions: quadratures are interleaved `(x₁, p₁, x₂, p₂, …)`, the
//! symplectic form is built from blocks `[[0, 1], [−1, 0]]`, and the vacuum
//! covariance matrix is `I/2`. Within a chain, mode 0 is the system and
//! modes `1..` are the retained ancillae, oldest first.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix, C};
use crate::scalar::Real;
use crate::Window;

/// Slack on the uncertainty relation `σ + iΩ/2 ⪰ 0`.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Purity deviation below which a Gaussian state counts as pure.
pub const PURITY_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

/// `Ω = ⊕ [[0, 1], [−1, 0]]` over `n` modes.
pub fn symplectic_form<T: Real>(n: usize) -> RMatrix<T> {
    let mut o = RMatrix::zeros(2 * n);
    for k in 0..n {
        o[(2 * k, 2 * k + 1)] = T::one();
        o[(2 * k + 1, 2 * k)] = -T::one();
    }
    o
}

/// Zero-or-nonzero-mean Gaussian state described by its first two moments.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState<T> {
    mean: Vec<T>,
    cov: RMatrix<T>,
}

impl<T: Real> GaussianState<T> {
    /// Validates symmetry and the uncertainty relation.
    pub fn new(mean: Vec<T>, cov: RMatrix<T>) -> Result<Self> {
        if cov.dim() == 0 || cov.dim() % 2 != 0 || mean.len() != cov.dim() {
            return Err(Error::DimensionMismatch(format!(
                "mean of length {} with a {}x{} covariance matrix",
                mean.len(),
                cov.dim(),
                cov.dim()
            )));
        }
        let asym = cov.symmetry_error();
        if asym > T::tol(SYMMETRY_TOL) * cov.max_abs().max(T::one()) {
            return Err(Error::InvalidParameter(format!("covariance matrix is not symmetric ({asym:e})")));
        }
        let state = Self { mean, cov };
        state.check_physical()?;
        Ok(state)
    }

    pub fn zero_mean(cov: RMatrix<T>) -> Result<Self> {
        let n = cov.dim();
        Self::new(vec![T::zero(); n], cov)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self { mean: vec![T::zero(); 2 * n_modes], cov: RMatrix::identity(2 * n_modes).scale(T::lit(0.5)) }
    }

    /// Single-mode thermal state with occupation `nbar`, squeezed by `r`
    /// along `x` (variance `(1+2n̄) e^{2r} / 2`).
    pub fn thermal_squeezed(nbar: T, r: T) -> Result<Self> {
        let cov = thermal_squeezed_cov(nbar, r)?;
        Ok(Self { mean: vec![T::zero(); 2], cov })
    }

    pub fn thermal(nbar: T) -> Result<Self> {
        Self::thermal_squeezed(nbar, T::zero())
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn cov(&self) -> &RMatrix<T> {
        &self.cov
    }

    /// `Ok` iff `σ + iΩ/2 + tol·I` admits a Cholesky factorization.
    pub fn check_physical(&self) -> Result<()> {
        let n = self.cov.dim();
        let omega = symplectic_form::<T>(n / 2);
        let half = T::lit(0.5);
        let shift = T::tol(PHYSICALITY_TOL);
        let m = CMatrix::from_fn(n, |i, j| {
            let d = if i == j { shift } else { T::zero() };
            C::new(self.cov[(i, j)] + d, half * omega[(i, j)])
        });
        if complex_cholesky_succeeds(&m) {
            return Ok(());
        }
        let eig = crate::linalg::hermitian_eig(&m)?;
        Err(Error::Unphysical((eig.min_value() - shift).to_f64().unwrap_or(f64::NAN)))
    }

    /// `Tr ρ² = det(2σ)^{-1/2}`.
    pub fn purity(&self) -> Result<T> {
        Ok((-T::lit(0.5) * self.cov.scale(T::lit(2.0)).log_det_spd()?).exp())
    }

    /// Pure to within [`PURITY_TOL`].
    pub fn is_pure(&self) -> bool {
        self.purity().is_ok_and(|mu| (T::one() - mu).abs() <= T::lit(PURITY_TOL))
    }

    /// Symplectic eigenvalues of the covariance matrix (all `½` for a pure state).
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<T>> {
        crate::metrics::symplectic_spectrum(&self.cov)
    }

    /// Gaussian partial trace: keeps the listed modes in ascending order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter("marginal over an empty mode set".into()));
        }
        let mut modes = keep.to_vec();
        modes.sort_unstable();
        modes.dedup();
        if let Some(&bad) = modes.iter().find(|&&m| m >= self.n_modes()) {
            return Err(Error::IndexOutOfRange { index: bad, len: self.n_modes() });
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        Ok(Self { mean: idx.iter().map(|&i| self.mean[i]).collect(), cov: self.cov.select(&idx) })
    }

    /// Tensor product: direct sum of moments.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            mean: self.mean.iter().chain(&other.mean).copied().collect(),
            cov: RMatrix::direct_sum(&self.cov, &other.cov),
        }
    }

    /// Zeroes every covariance entry coupling `part` to its complement.
    /// For zero-mean states this is exactly the product of the two marginals.
    pub fn decorrelate(&self, part: &[usize]) -> Self {
        let inside = |i: usize| part.contains(&(i / 2));
        let mut cov = self.cov.clone();
        let n = cov.dim();
        for i in 0..n {
            for j in 0..n {
                if inside(i) != inside(j) {
                    cov[(i, j)] = T::zero();
                }
            }
        }
        Self { mean: self.mean.clone(), cov }
    }

    /// Applies a passive (orthogonal symplectic) two-mode transformation
    /// `s` on modes `(i, j)`.
    ///
    /// The update acts on `σ − I/2`, so vacuum modes stay bit-exact vacuum.
    pub fn apply_passive(&self, s: &RMatrix<T>, (i, j): (usize, usize)) -> Result<Self> {
        if s.dim() != 4 || i == j || i >= self.n_modes() || j >= self.n_modes() {
            return Err(Error::InvalidParameter(format!("two-mode transformation on modes ({i}, {j})")));
        }
        let idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
        let n = self.cov.dim();
        let half = T::lit(0.5);
        let mut delta = self.cov.clone();
        for k in 0..n {
            delta[(k, k)] -= half;
        }
        // Rows, then columns.
        let mut rows = delta.clone();
        for col in 0..n {
            for (a, &ra) in idx.iter().enumerate() {
                rows[(ra, col)] = (0..4).map(|b| s[(a, b)] * delta[(idx[b], col)]).sum();
            }
        }
        let mut out = rows.clone();
        for row in 0..n {
            for (a, &ca) in idx.iter().enumerate() {
                out[(row, ca)] = (0..4).map(|b| rows[(row, idx[b])] * s[(a, b)]).sum();
            }
        }
        for k in 0..n {
            out[(k, k)] += half;
        }
        let mut mean = self.mean.clone();
        for (a, &ra) in idx.iter().enumerate() {
            mean[ra] = (0..4).map(|b| s[(a, b)] * self.mean[idx[b]]).sum();
        }
        Ok(Self { mean, cov: out })
    }

    /// Drops one mode (rows and columns deleted).
    pub fn without_mode(&self, mode: usize) -> Result<Self> {
        let keep: Vec<usize> = (0..self.n_modes()).filter(|&m| m != mode).collect();
        self.marginal(&keep)
    }
}

fn complex_cholesky_succeeds<T: Real>(m: &CMatrix<T>) -> bool {
    let n = m.dim();
    let mut l = vec![C::new(T::zero(), T::zero()); n * n];
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        l[j * n + j] = C::new(d, T::zero());
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / d;
        }
    }
    true
}

/// Covariance matrix of a thermal squeezed state:
/// `(1+2n̄)/2 · diag(cosh 2r + sinh 2r, cosh 2r − sinh 2r)`.
pub fn thermal_squeezed_cov<T: Real>(nbar: T, r: T) -> Result<RMatrix<T>> {
    if !(nbar >= T::zero()) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!("thermal occupation {nbar} / squeezing {r}")));
    }
    let pref = (T::one() + T::lit(2.0) * nbar) * T::lit(0.5);
    let (c, s) = ((T::lit(2.0) * r).cosh(), (T::lit(2.0) * r).sinh());
    Ok(RMatrix::from_diag(&[pref * (c + s), pref * (c - s)]))
}

/// System–ancilla beamsplitter on `(x₁, p₁, x₂, p₂)`.
pub fn bs_sa<T: Real>(theta: T) -> RMatrix<T> {
    let (s, c) = theta.sin_cos();
    let z = T::zero();
    RMatrix::new(4, vec![c, z, s, z, z, c, z, s, -s, z, c, z, z, -s, z, c]).expect("4x4")
}

/// Ancilla–ancilla beamsplitter: the [`bs_sa`] transmittivity `cos θ` with
/// the reflection sign moved to the other mode, i.e. `bs_sa(−θ) = bs_sa(θ)ᵀ`.
///
/// With this choice a strong AA collision (θ near π/2) hands the state of
/// the ancilla that just met the system on to the next incoming ancilla,
/// as the qubit partial swap does.
pub fn bs_aa<T: Real>(theta: T) -> RMatrix<T> {
    bs_sa(-theta)
}

/// Parameters of a CV collision run.
#[derive(Clone, Debug, PartialEq)]
pub struct CVParams<T> {
    pub theta_sa: T,
    pub theta_aa: T,
    pub ancilla_nbar: T,
    pub window: Window,
    pub steps: usize,
}

impl<T: Real> CVParams<T> {
    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if !self.theta_sa.is_finite() || !self.theta_aa.is_finite() {
            return Err(Error::InvalidParameter("collision angles must be finite".into()));
        }
        if !(self.ancilla_nbar >= T::zero()) {
            return Err(Error::InvalidParameter("ancilla occupation must be non-negative".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn fresh_ancilla(&self) -> Result<GaussianState<T>> {
        GaussianState::thermal(self.ancilla_nbar)
    }
}

/// Joint state of the system and its retained ancilla window.
#[derive(Clone, Debug, PartialEq)]
pub struct CVChainState<T> {
    pub state: GaussianState<T>,
    /// Global label of the newest (incoming) ancilla, counting from 1.
    pub next_ancilla_label: usize,
    /// Number of ancillae traced out so far.
    pub discarded: usize,
}

impl<T: Real> CVChainState<T> {
    /// System ⊗ first incoming ancilla.
    pub fn initial(system: &GaussianState<T>, params: &CVParams<T>) -> Result<Self> {
        if system.n_modes() != 1 {
            return Err(Error::InvalidParameter("system must be a single mode".into()));
        }
        Ok(Self { state: system.tensor(&params.fresh_ancilla()?), next_ancilla_label: 1, discarded: 0 })
    }

    pub fn ancillas(&self) -> usize {
        self.state.n_modes() - 1
    }
}

/// One collision step: SA beamsplitter on the system and incoming ancilla,
/// optional system–environment decorrelation, window shift, then the AA
/// beamsplitter between that ancilla and a fresh one.
pub fn cv_step<T: Real>(chain: &CVChainState<T>, params: &CVParams<T>, erase: bool) -> Result<CVChainState<T>> {
    let m = chain.ancillas();
    let mut g = chain.state.apply_passive(&bs_sa(params.theta_sa), (0, m))?;
    if erase {
        g = g.decorrelate(&[0]);
    }
    let mut discarded = chain.discarded;
    if params.window.is_full(m) {
        g = g.without_mode(1)?;
        discarded += 1;
    }
    g = g.tensor(&params.fresh_ancilla()?);
    let last = g.n_modes() - 1;
    g = g.apply_passive(&bs_aa(params.theta_aa), (last - 1, last))?;
    g.check_physical()?;
    Ok(CVChainState { state: g, next_ancilla_label: chain.next_ancilla_label + 1, discarded })
}

/// Marginal over a mode subset of the chain.
pub fn cv_marginal<T: Real>(chain: &CVChainState<T>, keep: &[usize]) -> Result<GaussianState<T>> {
    chain.state.marginal(keep)
}

/// Product of the marginals on `part` and its complement (zero-mean case).
pub fn cv_decorrelate<T: Real>(state: &GaussianState<T>, part: &[usize]) -> GaussianState<T> {
    state.decorrelate(part)
}
