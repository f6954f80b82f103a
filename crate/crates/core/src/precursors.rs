//! Analysis of trajectory pairs: the system distinguishability grid, the
//! precursor terms bounding its revivals (environment change and the two
//! system–environment correlation terms), the marginal hierarchy over
//! retained ancillae, revival detection, the internal/external information
//! split and steady-state fidelity traces.
//!
//! Every grid is evaluated row by row in parallel. Rows never share a
//! reduction, so results do not depend on the number of threads.

use rayon::prelude::*;

use crate::cv::{cv_step, CVChainState, CVParams, GaussianState};
use crate::density::DensityMatrix;
use crate::dv::{dv_step, DVChainState, DVParams};
use crate::error::{Error, Result};
use crate::metrics::{bures_from_fidelity, gaussian_fidelity, trace_distance, uhlmann_fidelity};
use crate::scalar::Real;
use crate::Window;

/// Largest joint dimension accepted for the information decomposition.
pub const MAX_INFO_DIM: usize = 1024;

/// Default revival threshold.
pub const REVIVAL_EPS: f64 = 1e-9;

/// A multipartite state on which the precursor quantities can be evaluated.
pub trait CompositeState<T: Real>: Clone + Send + Sync + Sized {
    fn subsystem_count(&self) -> usize;
    /// Reduced state on `keep`, in ascending site order.
    fn reduced(&self, keep: &[usize]) -> Result<Self>;
    /// Tensor product, `self` first.
    fn joined(&self, other: &Self) -> Self;
    fn fidelity(&self, other: &Self) -> Result<T>;
    fn trace_distance(&self, other: &Self) -> Result<T>;

    fn distance(&self, other: &Self, metric: Metric) -> Result<T> {
        match metric {
            Metric::Bures => self.fidelity(other).map(bures_from_fidelity),
            Metric::Trace => self.trace_distance(other),
        }
    }
}

impl<T: Real> CompositeState<T> for DensityMatrix<T> {
    fn subsystem_count(&self) -> usize {
        self.space().len()
    }

    fn reduced(&self, keep: &[usize]) -> Result<Self> {
        self.marginal(keep)
    }

    fn joined(&self, other: &Self) -> Self {
        self.tensor(other)
    }

    fn fidelity(&self, other: &Self) -> Result<T> {
        uhlmann_fidelity(self.matrix(), other.matrix())
    }

    fn trace_distance(&self, other: &Self) -> Result<T> {
        trace_distance(self.matrix(), other.matrix())
    }
}

impl<T: Real> CompositeState<T> for GaussianState<T> {
    fn subsystem_count(&self) -> usize {
        self.n_modes()
    }

    fn reduced(&self, keep: &[usize]) -> Result<Self> {
        self.marginal(keep)
    }

    fn joined(&self, other: &Self) -> Self {
        self.tensor(other)
    }

    fn fidelity(&self, other: &Self) -> Result<T> {
        gaussian_fidelity(self, other)
    }

    fn trace_distance(&self, _: &Self) -> Result<T> {
        Err(Error::UnsupportedMetric("trace distance has no closed form for Gaussian states".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Dv,
    Cv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Bures,
    Trace,
}

/// Two runs of the same collision model from different system states.
///
/// `first[n]` and `second[n]` are the joint system + retained-ancilla states
/// after step `n` (index 0 is the initial product state). Site 0 is the
/// system; ancillae follow from oldest to newest.
#[derive(Clone, Debug)]
pub struct TrajectoryPair<S> {
    pub model: ModelKind,
    pub first: Vec<S>,
    pub second: Vec<S>,
    /// The state every fresh ancilla is prepared in (the steady state).
    pub reference: S,
    /// Ancillae traced out before each snapshot.
    pub discarded: Vec<usize>,
    pub window: Window,
    pub steps: usize,
}

impl<S> TrajectoryPair<S> {
    /// True when no ancilla was ever discarded, so the environment is exact.
    pub fn is_exact(&self) -> bool {
        self.discarded.last().is_none_or(|&d| d == 0)
    }

    fn check_snapshot(&self, s: usize) -> Result<()> {
        if s > self.steps {
            return Err(Error::IndexOutOfRange { index: s, len: self.steps + 1 });
        }
        Ok(())
    }
}

fn run_pair<St: Send, S: Send>(
    init: (St, St),
    steps: usize,
    step: impl Fn(&St) -> Result<St> + Sync,
    snap: impl Fn(&St) -> (S, usize) + Sync,
) -> Result<(Vec<S>, Vec<S>, Vec<usize>)> {
    let run = |start: St| -> Result<(Vec<S>, Vec<usize>)> {
        let mut out = Vec::with_capacity(steps + 1);
        let mut discarded = Vec::with_capacity(steps + 1);
        let mut chain = start;
        for n in 0..=steps {
            if n > 0 {
                chain = step(&chain)?;
            }
            let (state, d) = snap(&chain);
            out.push(state);
            discarded.push(d);
        }
        Ok((out, discarded))
    };
    let (a, b) = rayon::join(|| run(init.0), || run(init.1));
    let ((first, discarded), (second, _)) = (a?, b?);
    Ok((first, second, discarded))
}

/// Runs both system states through identical qubit collision sequences.
pub fn simulate_dv_pair<T: Real>(
    params: &DVParams<T>,
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    erase: bool,
) -> Result<TrajectoryPair<DensityMatrix<T>>> {
    params.validate()?;
    let init = (DVChainState::initial(rho1, params)?, DVChainState::initial(rho2, params)?);
    let (first, second, discarded) = run_pair(
        init,
        params.steps,
        |c| dv_step(c, params, erase),
        |c| (c.state.clone(), c.discarded),
    )?;
    Ok(TrajectoryPair {
        model: ModelKind::Dv,
        first,
        second,
        reference: params.fresh_ancilla()?,
        discarded,
        window: params.window,
        steps: params.steps,
    })
}

/// Runs both single-mode Gaussian states through identical beamsplitter
/// collision sequences.
pub fn simulate_cv_pair<T: Real>(
    params: &CVParams<T>,
    g1: &GaussianState<T>,
    g2: &GaussianState<T>,
    erase: bool,
) -> Result<TrajectoryPair<GaussianState<T>>> {
    params.validate()?;
    let init = (CVChainState::initial(g1, params)?, CVChainState::initial(g2, params)?);
    let (first, second, discarded) = run_pair(
        init,
        params.steps,
        |c| cv_step(c, params, erase),
        |c| (c.state.clone(), c.discarded),
    )?;
    Ok(TrajectoryPair {
        model: ModelKind::Cv,
        first,
        second,
        reference: params.fresh_ancilla()?,
        discarded,
        window: params.window,
        steps: params.steps,
    })
}

/// Revival grid of the system distinguishability.
///
/// Stores `d[t] − d[0]`; entry `(s, t)` is the difference of two stored
/// offsets, so `lhs(s, t) = lhs(0, t) − lhs(0, s)` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct LhsGrid<T> {
    distances: Vec<T>,
    offsets: Vec<T>,
}

impl<T: Real> LhsGrid<T> {
    pub fn from_distances(distances: Vec<T>) -> Self {
        let d0 = distances.first().copied().unwrap_or_else(T::zero);
        let offsets = distances.iter().map(|&d| d - d0).collect();
        Self { distances, offsets }
    }

    pub fn steps(&self) -> usize {
        self.distances.len().saturating_sub(1)
    }

    /// System distance at each snapshot.
    pub fn distances(&self) -> &[T] {
        &self.distances
    }

    /// `d(t) − d(s)`.
    pub fn value(&self, s: usize, t: usize) -> T {
        self.offsets[t] - self.offsets[s]
    }

    /// Entries `(s, t, lhs)` for `0 ≤ s < t ≤ steps`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        let n = self.steps();
        (0..n).flat_map(move |s| (s + 1..=n).map(move |t| (s, t, self.value(s, t))))
    }
}

/// Distance between the two system marginals at every snapshot.
pub fn system_distances<T: Real, S: CompositeState<T>>(traj: &TrajectoryPair<S>, metric: Metric) -> Result<Vec<T>> {
    traj.first
        .par_iter()
        .zip(traj.second.par_iter())
        .map(|(a, b)| a.reduced(&[0])?.distance(&b.reduced(&[0])?, metric))
        .collect()
}

pub fn lhs_grid<T: Real, S: CompositeState<T>>(traj: &TrajectoryPair<S>, metric: Metric) -> Result<LhsGrid<T>> {
    Ok(LhsGrid::from_distances(system_distances(traj, metric)?))
}

/// The three precursor terms at one reference time and hierarchy level.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct RhsTerms<T> {
    /// Distance between the two environment marginals.
    pub env: T,
    /// Distance of trajectory 1's system–environment state from the product of its marginals.
    pub corr1: T,
    /// Same for trajectory 2.
    pub corr2: T,
}

impl<T: Real> RhsTerms<T> {
    pub fn sum(&self) -> T {
        self.env + self.corr1 + self.corr2
    }
}

/// Environment sites kept at level `k` when `m` ancillae are retained: the
/// `k` oldest are traced out.
fn env_sites(m: usize, k: usize) -> Vec<usize> {
    (1 + k.min(m)..=m).collect()
}

fn correlation<T: Real, S: CompositeState<T>>(joint: &S, env: &[usize], metric: Metric) -> Result<T> {
    let keep: Vec<usize> = std::iter::once(0).chain(env.iter().copied()).collect();
    let sub = joint.reduced(&keep)?;
    let product = sub.reduced(&[0])?.joined(&sub.reduced(&(1..keep.len()).collect::<Vec<_>>())?);
    sub.distance(&product, metric)
}

/// Precursor terms at reference time `s` and hierarchy level `k`.
pub fn rhs_terms<T: Real, S: CompositeState<T>>(
    traj: &TrajectoryPair<S>,
    s: usize,
    k: usize,
    metric: Metric,
) -> Result<RhsTerms<T>> {
    traj.check_snapshot(s)?;
    let capacity = traj.window.capacity(traj.steps);
    if k > capacity {
        return Err(Error::InvalidParameter(format!("hierarchy level {k} exceeds window {capacity}")));
    }
    let (a, b) = (&traj.first[s], &traj.second[s]);
    let env = env_sites(a.subsystem_count() - 1, k);
    if env.is_empty() {
        return Ok(RhsTerms { env: T::zero(), corr1: T::zero(), corr2: T::zero() });
    }
    Ok(RhsTerms {
        env: a.reduced(&env)?.distance(&b.reduced(&env)?, metric)?,
        corr1: correlation(a, &env, metric)?,
        corr2: correlation(b, &env, metric)?,
    })
}

/// Precursor terms at one reference time for each listed level.
pub fn hierarchy_sweep<T: Real, S: CompositeState<T>>(
    traj: &TrajectoryPair<S>,
    s: usize,
    levels: &[usize],
    metric: Metric,
) -> Result<Vec<(usize, RhsTerms<T>)>> {
    levels.iter().map(|&k| Ok((k, rhs_terms(traj, s, k, metric)?))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhsRow<T> {
    pub s: usize,
    pub k: usize,
    pub terms: RhsTerms<T>,
}

/// Precursor terms for every reference time `0 ≤ s < steps` and level,
/// ordered by `(s, k)`.
pub fn rhs_table<T: Real, S: CompositeState<T>>(
    traj: &TrajectoryPair<S>,
    levels: &[usize],
    metric: Metric,
) -> Result<Vec<RhsRow<T>>> {
    let tasks: Vec<(usize, usize)> = (0..traj.steps).flat_map(|s| levels.iter().map(move |&k| (s, k))).collect();
    tasks
        .into_par_iter()
        .map(|(s, k)| Ok(RhsRow { s, k, terms: rhs_terms(traj, s, k, metric)? }))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RevivalRow<T> {
    pub s: usize,
    pub any: bool,
    /// Largest revival in the row, zero when there is none.
    pub max: T,
    pub first_t: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RevivalReport<T> {
    pub eps: T,
    /// `mask[s][t]` is set when `lhs(s, t) > eps`; false for `t ≤ s`.
    pub mask: Vec<Vec<bool>>,
    pub rows: Vec<RevivalRow<T>>,
}

impl<T: Real> RevivalReport<T> {
    pub fn count(&self) -> usize {
        self.mask.iter().flatten().filter(|&&b| b).count()
    }
}

pub fn detect_revivals<T: Real>(lhs: &LhsGrid<T>, eps: T) -> Result<RevivalReport<T>> {
    if !(eps > T::zero()) {
        return Err(Error::InvalidParameter(format!("revival threshold must be positive, got {eps}")));
    }
    let n = lhs.steps();
    let mask: Vec<Vec<bool>> = (0..=n).map(|s| (0..=n).map(|t| t > s && lhs.value(s, t) > eps).collect()).collect();
    let rows = (0..n)
        .map(|s| {
            let first_t = (s + 1..=n).find(|&t| mask[s][t]);
            let max = (s + 1..=n).filter(|&t| mask[s][t]).map(|t| lhs.value(s, t)).fold(T::zero(), T::max);
            RevivalRow { s, any: first_t.is_some(), max, first_t }
        })
        .collect();
    Ok(RevivalReport { eps, mask, rows })
}

/// Trace-distance information split: `i_int` is accessible on the system
/// alone, `i_ext = i_tot − i_int` requires the environment too.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoDecomposition<T> {
    pub i_tot: Vec<T>,
    pub i_int: Vec<T>,
    pub i_ext: Vec<T>,
}

/// Requires a run that never discarded an ancilla.
pub fn info_decomposition<T: Real, S: CompositeState<T>>(traj: &TrajectoryPair<S>) -> Result<InfoDecomposition<T>> {
    if traj.model != ModelKind::Dv {
        return Err(Error::UnsupportedMetric("information decomposition needs the trace distance".into()));
    }
    if !traj.is_exact() {
        return Err(Error::InvalidParameter("information decomposition needs a run without discarded ancillae".into()));
    }
    let sites = traj.first.last().map_or(0, |s| s.subsystem_count());
    if sites >= usize::BITS as usize || 1usize << sites > MAX_INFO_DIM {
        return Err(Error::InvalidParameter(format!("joint dimension 2^{sites} exceeds {MAX_INFO_DIM}")));
    }
    let i_tot: Vec<T> = traj
        .first
        .par_iter()
        .zip(traj.second.par_iter())
        .map(|(a, b)| a.trace_distance(b))
        .collect::<Result<_>>()?;
    let i_int = system_distances(traj, Metric::Trace)?;
    let i_ext = i_tot.iter().zip(&i_int).map(|(&tot, &int)| tot - int).collect();
    Ok(InfoDecomposition { i_tot, i_int, i_ext })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyPoint<T> {
    pub n: usize,
    /// Fidelity of the first trajectory's system with the steady state.
    pub f_system: T,
    /// Fidelity of the next incoming ancilla with a fresh one.
    pub f_incoming: T,
}

pub fn steady_state_trace<T: Real, S: CompositeState<T>>(traj: &TrajectoryPair<S>) -> Result<Vec<SteadyPoint<T>>> {
    traj.first
        .par_iter()
        .enumerate()
        .map(|(n, state)| {
            let last = state.subsystem_count() - 1;
            Ok(SteadyPoint {
                n,
                f_system: state.reduced(&[0])?.fidelity(&traj.reference)?,
                f_incoming: state.reduced(&[last])?.fidelity(&traj.reference)?,
            })
        })
        .collect()
}

/// Whether the precursor terms describe the whole environment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMode {
    Exact,
    /// Some ancillae were discarded; the terms only bound from below.
    LowerBound,
}

impl BoundMode {
    pub fn label(&self) -> &'static str {
        match self {
            BoundMode::Exact => "exact",
            BoundMode::LowerBound => "lower-bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions<T> {
    pub metric: Metric,
    pub levels: Vec<usize>,
    pub revival_eps: T,
    /// Compute the information decomposition (exact qubit runs only).
    pub info: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub mode: BoundMode,
    pub metric: Metric,
    pub levels: Vec<usize>,
    pub lhs: LhsGrid<T>,
    pub rhs: Vec<RhsRow<T>>,
    pub revivals: RevivalReport<T>,
    pub steady: Vec<SteadyPoint<T>>,
    pub info: Option<InfoDecomposition<T>>,
}

impl<T: Real> BoundReport<T> {
    /// Precursor terms at `(s, k)`, if that level was evaluated.
    pub fn rhs_at(&self, s: usize, k: usize) -> Option<&RhsTerms<T>> {
        self.rhs.iter().find(|r| r.s == s && r.k == k).map(|r| &r.terms)
    }
}

pub fn analyze<T: Real, S: CompositeState<T>>(traj: &TrajectoryPair<S>, opts: &AnalysisOptions<T>) -> Result<BoundReport<T>> {
    let lhs = lhs_grid(traj, opts.metric)?;
    let revivals = detect_revivals(&lhs, opts.revival_eps)?;
    Ok(BoundReport {
        mode: if traj.is_exact() { BoundMode::Exact } else { BoundMode::LowerBound },
        metric: opts.metric,
        levels: opts.levels.clone(),
        rhs: rhs_table(traj, &opts.levels, opts.metric)?,
        steady: steady_state_trace(traj)?,
        info: if opts.info { Some(info_decomposition(traj)?) } else { None },
        lhs,
        revivals,
    })
}
