//! Discrete-variable qubit collision model.
//!
//! The chain state lives on `[2; 1 + m]`: site 0 is the system, sites
//! `1..=m` the retained ancillae from oldest to newest. The newest ancilla is
//! always the incoming one for the next system collision.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{apply_two_site, CMatrix, TensorSpace, C};
use crate::scalar::Real;
use crate::Window;

/// `cos θ 𝟙 + i sin θ SWAP` on two qubits, basis `{00, 01, 10, 11}`.
pub fn partial_swap<T: Real>(theta: T) -> CMatrix<T> {
    let (s, c) = theta.sin_cos();
    let diag = C::new(c, s);
    let mut u = CMatrix::zeros(4);
    u[(0, 0)] = diag;
    u[(3, 3)] = diag;
    u[(1, 1)] = C::new(c, T::zero());
    u[(2, 2)] = C::new(c, T::zero());
    u[(1, 2)] = C::new(T::zero(), s);
    u[(2, 1)] = C::new(T::zero(), s);
    u
}

/// Pure real qubit state `α|0⟩ + √(1−α²)|1⟩`.
pub fn dv_initial_system<T: Real>(alpha: T) -> Result<DensityMatrix<T>> {
    if !(alpha.abs() <= T::one()) {
        return Err(Error::InvalidParameter(format!("|alpha| = {} exceeds 1", alpha.abs())));
    }
    let beta = (T::one() - alpha * alpha).max(T::zero()).sqrt();
    let m = CMatrix::from_real(2, &[alpha * alpha, alpha * beta, alpha * beta, beta * beta])?;
    DensityMatrix::single(m)
}

/// Ancilla `diag(1 − p, p)`.
pub fn dv_ancilla<T: Real>(excitation: T) -> Result<DensityMatrix<T>> {
    if !(excitation >= T::zero() && excitation <= T::one()) {
        return Err(Error::InvalidParameter(format!("ancilla excitation {excitation} outside [0, 1]")));
    }
    DensityMatrix::single(CMatrix::from_real_diag(&[T::one() - excitation, excitation]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DVParams<T> {
    pub theta_sa: T,
    pub theta_aa: T,
    /// Excited-state population `p` of every fresh ancilla.
    pub ancilla_excitation: T,
    pub window: Window,
    pub steps: usize,
}

impl<T: Real> DVParams<T> {
    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        if !self.theta_sa.is_finite() || !self.theta_aa.is_finite() {
            return Err(Error::InvalidParameter("collision angles must be finite".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        dv_ancilla(self.ancilla_excitation).map(|_| ())
    }

    pub fn fresh_ancilla(&self) -> Result<DensityMatrix<T>> {
        dv_ancilla(self.ancilla_excitation)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DVChainState<T> {
    pub state: DensityMatrix<T>,
    /// Global label of the newest (incoming) ancilla, counting from 1.
    pub next_ancilla_label: usize,
    /// Number of ancillae traced out so far.
    pub discarded: usize,
}

impl<T: Real> DVChainState<T> {
    /// System ⊗ first incoming ancilla.
    pub fn initial(system: &DensityMatrix<T>, params: &DVParams<T>) -> Result<Self> {
        if system.dim() != 2 {
            return Err(Error::InvalidParameter("system must be a qubit".into()));
        }
        Ok(Self { state: system.tensor(&params.fresh_ancilla()?), next_ancilla_label: 1, discarded: 0 })
    }

    pub fn ancillas(&self) -> usize {
        self.state.space().len() - 1
    }
}

/// One collision step.
///
/// SA partial swap on (system, incoming ancilla); optionally replace the
/// state by `ρ_S ⊗ ρ_env`; trace out the oldest ancilla if the window is
/// full; append a fresh ancilla; AA partial swap between the ancilla that
/// just met the system and the fresh one. The result is Hermitized and
/// renormalized to unit trace.
pub fn dv_step<T: Real>(chain: &DVChainState<T>, params: &DVParams<T>, erase: bool) -> Result<DVChainState<T>> {
    let m = chain.ancillas();
    let space = chain.state.space().clone();
    let rho = apply_two_site(chain.state.matrix(), &partial_swap(params.theta_sa), &space, (0, m))?;
    let mut state = DensityMatrix::from_parts_unchecked(space, rho);
    if erase {
        let system = state.marginal(&[0])?;
        let env = state.marginal(&(1..=m).collect::<Vec<_>>())?;
        state = system.tensor(&env);
    }
    let mut discarded = chain.discarded;
    if params.window.is_full(m) {
        let keep: Vec<usize> = std::iter::once(0).chain(2..=m).collect();
        state = state.marginal(&keep)?;
        discarded += 1;
    }
    state = state.tensor(&params.fresh_ancilla()?);
    let last = state.space().len() - 1;
    let space = state.space().clone();
    let rho = apply_two_site(state.matrix(), &partial_swap(params.theta_aa), &space, (last - 1, last))?;
    let state = DensityMatrix::from_parts_unchecked(space, rho).repaired();
    crate::density::check_state(state.matrix())?;
    Ok(DVChainState { state, next_ancilla_label: chain.next_ancilla_label + 1, discarded })
}

/// Reduced state on the listed chain sites (0 = system).
pub fn dv_marginal<T: Real>(chain: &DVChainState<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    chain.state.marginal(keep)
}

/// The qubit chain layout for `m` ancillae.
pub fn chain_space(m: usize) -> TensorSpace {
    TensorSpace::uniform(2, 1 + m)
}
