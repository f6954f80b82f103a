//! Fock-space truncation oracle for Gaussian states of one or two modes.
//!
//! States are kept as weighted mixtures of pure truncated vectors rather
//! than as full density matrices, which keeps two modes at cutoff 60
//! (dimension 3600) tractable. The fidelity of two mixtures `ρ = AA†`,
//! `σ = BB†` is the trace norm of `A†B`.

use rayon::prelude::*;

use crate::cv::{bs_sa, thermal_squeezed_cov, GaussianState};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{expm_antihermitian, nuclear_norm, CMatrix, RMatrix, TensorSpace, C};
use crate::scalar::Real;

/// Thermal components lighter than this are dropped (and counted as lost norm).
const WEIGHT_FLOOR: f64 = 1e-16;

/// Extra levels used when exponentiating the squeeze generator, so that
/// the truncation edge does not distort the kept block.
const SQUEEZE_PADDING: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockConfig {
    /// Fock levels per mode.
    pub cutoff: usize,
    /// Largest norm a state may lose to truncation.
    pub tolerance: f64,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self { cutoff: 60, tolerance: 1e-8 }
    }
}

impl FockConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 2 {
            return Err(Error::InvalidParameter(format!("cutoff must be at least 2, got {}", self.cutoff)));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!("tolerance {} outside (0, 1)", self.tolerance)));
        }
        Ok(())
    }
}

/// Truncated annihilation operator `a` on `dim` levels.
pub fn annihilation<T: Real>(dim: usize) -> CMatrix<T> {
    CMatrix::from_fn(dim, |i, j| {
        if j == i + 1 {
            C::new(T::from_usize(j).unwrap().sqrt(), T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}

/// `exp((r/2)(a†² − a²))` on `dim` levels. Squeezes `p` and stretches `x`,
/// so that the vacuum maps to covariance `diag(e^{2r}, e^{−2r})/2`.
pub fn squeeze_unitary<T: Real>(r: T, dim: usize) -> Result<CMatrix<T>> {
    // h = i (a†² − a²)/2 is Hermitian and exp(-i r h) is the squeeze.
    let half = T::lit(0.5);
    let h = CMatrix::from_fn(dim, |i, j| {
        let amp = |n: usize| T::from_usize(n * (n - 1)).unwrap().sqrt() * half;
        if i == j + 2 {
            C::new(T::zero(), amp(i))
        } else if j == i + 2 {
            C::new(T::zero(), -amp(j))
        } else {
            C::new(T::zero(), T::zero())
        }
    });
    expm_antihermitian(&h, r)
}

/// A truncated state `Σ_i w_i |v_i⟩⟨v_i|` on `modes` modes of `cutoff`
/// levels each. Weights sum to one after construction.
#[derive(Clone, Debug)]
pub struct FockMixture<T> {
    cutoff: usize,
    modes: usize,
    weights: Vec<T>,
    vectors: Vec<Vec<C<T>>>,
    /// Total photon-number parity of each vector (odd = true). Squeezing and
    /// beamsplitters conserve it, so opposite parities are exactly orthogonal.
    odd: Vec<bool>,
    /// Norm lost to truncation and dropped components, before renormalization.
    loss: f64,
}

fn norm_sqr<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_loss(cutoff: usize, loss: f64, cfg: &FockConfig) -> Result<()> {
    if loss > cfg.tolerance || loss.is_nan() {
        return Err(Error::InsufficientCutoff { cutoff, captured: 1.0 - loss });
    }
    Ok(())
}

impl<T: Real> FockMixture<T> {
    fn normalized(cutoff: usize, modes: usize, comps: Vec<(T, bool, Vec<C<T>>)>, loss: f64) -> Self {
        let total: T = comps.iter().map(|(w, _, _)| *w).sum();
        let mut weights = Vec::with_capacity(comps.len());
        let mut vectors = Vec::with_capacity(comps.len());
        let mut odd = Vec::with_capacity(comps.len());
        for (w, parity, v) in comps {
            weights.push(w / total);
            odd.push(parity);
            vectors.push(v);
        }
        Self { cutoff, modes, weights, vectors, odd, loss }
    }

    /// `S(r) ρ_th(n̄) S(r)†` truncated to `cfg.cutoff` levels.
    pub fn thermal_squeezed(nbar: T, r: T, cfg: &FockConfig) -> Result<Self> {
        cfg.validate()?;
        if !(nbar >= T::zero()) {
            return Err(Error::InvalidParameter(format!("occupation {nbar} must be non-negative")));
        }
        let c = cfg.cutoff;
        let padded = c + SQUEEZE_PADDING;
        let s = squeeze_unitary(r, padded)?;
        let q = nbar / (nbar + T::one());
        let p0 = T::one() / (nbar + T::one());
        let floor = T::lit(WEIGHT_FLOOR);
        let mut comps = Vec::new();
        let mut kept = T::zero();
        for k in 0..padded {
            let p = p0 * q.powi(k as i32);
            if p < floor {
                break;
            }
            // Entries of the other parity are rounding noise.
            let v: Vec<C<T>> =
                (0..c).map(|i| if (i + k) % 2 == 0 { s[(i, k)] } else { C::new(T::zero(), T::zero()) }).collect();
            let w = p * norm_sqr(&v);
            kept += w;
            let n = norm_sqr(&v).sqrt();
            comps.push((w, k % 2 == 1, v.into_iter().map(|z| z / n).collect()));
        }
        let loss = (T::one() - kept).to_f64().unwrap_or(f64::NAN).max(0.0);
        check_loss(c, loss, cfg)?;
        Ok(Self::normalized(c, 1, comps, loss))
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn components(&self) -> usize {
        self.weights.len()
    }

    /// Norm discarded by truncation before renormalization.
    pub fn truncation_loss(&self) -> f64 {
        self.loss
    }

    fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    /// `self ⊗ other`, dropping products lighter than the weight floor.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch(format!("cutoffs {} and {}", self.cutoff, other.cutoff)));
        }
        let floor = T::lit(WEIGHT_FLOOR);
        let mut comps = Vec::new();
        let mut dropped = T::zero();
        for ((wa, va), pa) in self.weights.iter().zip(&self.vectors).zip(&self.odd) {
            for ((wb, vb), pb) in other.weights.iter().zip(&other.vectors).zip(&other.odd) {
                let w = *wa * *wb;
                if w < floor {
                    dropped += w;
                    continue;
                }
                let v = va.iter().flat_map(|&x| vb.iter().map(move |&y| x * y)).collect();
                comps.push((w, pa ^ pb, v));
            }
        }
        let loss = self.loss + other.loss + dropped.to_f64().unwrap_or(f64::NAN);
        Ok(Self::normalized(self.cutoff, self.modes + other.modes, comps, loss))
    }

    /// Applies the two-mode beamsplitter `exp(θ(a†b − ab†))`.
    ///
    /// Input weight with total photon number ≥ cutoff, whose exact image
    /// leaves the truncated space, is added to the loss.
    pub fn beamsplitter(&self, theta: T, cfg: &FockConfig) -> Result<Self> {
        if self.modes != 2 {
            return Err(Error::InvalidParameter("beamsplitter needs exactly two modes".into()));
        }
        let c = self.cutoff;
        let blocks = beamsplitter_blocks(theta, c)?;
        let mut lost = T::zero();
        let mut comps = Vec::with_capacity(self.components());
        for ((w, v), &parity) in self.weights.iter().zip(&self.vectors).zip(&self.odd) {
            let mut out = vec![C::new(T::zero(), T::zero()); c * c];
            for (n, u) in blocks.iter().enumerate() {
                let idx = block_indices(n, c);
                let x: Vec<C<T>> = idx.iter().map(|&(i, j)| v[i * c + j]).collect();
                if n >= c {
                    // The exact image of this block leaves the truncation.
                    lost += *w * norm_sqr(&x);
                }
                let y = u.apply(&x);
                for (&(i, j), yi) in idx.iter().zip(y) {
                    out[i * c + j] = yi;
                }
            }
            comps.push((*w, parity, out));
        }
        let loss = self.loss + lost.to_f64().unwrap_or(f64::NAN);
        check_loss(c, loss, cfg)?;
        Ok(Self::normalized(c, 2, comps, loss))
    }

    /// Full density matrix. Dimension `cutoff^modes`, so only for small cases.
    pub fn density(&self) -> Result<DensityMatrix<T>> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            for i in 0..d {
                let wi = v[i] * *w;
                if wi.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..d {
                    m[(i, j)] += wi * v[j].conj();
                }
            }
        }
        DensityMatrix::new(TensorSpace::uniform(self.cutoff, self.modes), m.hermitize())
    }

    /// Reduced density matrix of one mode.
    pub fn mode_density(&self, mode: usize) -> Result<CMatrix<T>> {
        if mode >= self.modes {
            return Err(Error::IndexOutOfRange { index: mode, len: self.modes });
        }
        let c = self.cutoff;
        let stride = c.pow((self.modes - 1 - mode) as u32);
        let mut m = CMatrix::zeros(c);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            for (flat, &x) in v.iter().enumerate() {
                let i = (flat / stride) % c;
                let rest = flat - i * stride;
                for k in 0..c {
                    m[(i, k)] += x * v[rest + k * stride].conj() * *w;
                }
            }
        }
        Ok(m)
    }

    /// `a_mode v`, truncated.
    fn lower(&self, v: &[C<T>], mode: usize) -> Vec<C<T>> {
        let c = self.cutoff;
        let stride = c.pow((self.modes - 1 - mode) as u32);
        let mut out = vec![C::new(T::zero(), T::zero()); v.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let n = (flat / stride) % c;
            if n + 1 < c {
                *o = v[flat + stride] * T::from_usize(n + 1).unwrap().sqrt();
            }
        }
        out
    }

    /// `a†_mode v`, truncated.
    fn raise(&self, v: &[C<T>], mode: usize) -> Vec<C<T>> {
        let c = self.cutoff;
        let stride = c.pow((self.modes - 1 - mode) as u32);
        let mut out = vec![C::new(T::zero(), T::zero()); v.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let n = (flat / stride) % c;
            if n > 0 {
                *o = v[flat - stride] * T::from_usize(n).unwrap().sqrt();
            }
        }
        out
    }

    /// Quadrature vectors `(x_1, p_1, x_2, p_2, …) v` with `x = (a + a†)/√2`.
    fn quadratures(&self, v: &[C<T>]) -> Vec<Vec<C<T>>> {
        let k = T::one() / T::lit(2.0).sqrt();
        (0..self.modes)
            .flat_map(|m| {
                let (lo, hi) = (self.lower(v, m), self.raise(v, m));
                let x = lo.iter().zip(&hi).map(|(a, b)| (a + b) * k).collect();
                let p = lo.iter().zip(&hi).map(|(a, b)| (a - b) * C::new(T::zero(), -k)).collect();
                [x, p]
            })
            .collect()
    }

    /// Quadrature means and symmetrized covariance matrix.
    pub fn moments(&self) -> (Vec<T>, RMatrix<T>) {
        let n = 2 * self.modes;
        let mut mean = vec![T::zero(); n];
        let mut second = RMatrix::<T>::zeros(n);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            let q = self.quadratures(v);
            for i in 0..n {
                mean[i] += *w * inner(v, &q[i]).re;
                for j in 0..n {
                    second[(i, j)] += *w * inner(&q[i], &q[j]).re;
                }
            }
        }
        let cov = RMatrix::from_fn(n, |i, j| second[(i, j)] - mean[i] * mean[j]);
        (mean, cov)
    }

    /// Uhlmann fidelity `‖A†B‖₁` between two truncated mixtures.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        if self.cutoff != other.cutoff || self.modes != other.modes {
            return Err(Error::DimensionMismatch("Fock mixtures over different spaces".into()));
        }
        // F = ‖A†B‖₁ for the factors A = [√w_i ψ_i] of each mixture; A†B is
        // block diagonal in parity.
        let mut total = T::zero();
        for parity in [false, true] {
            let pick = |m: &Self| -> Vec<usize> { (0..m.components()).filter(|&i| m.odd[i] == parity).collect() };
            let (a, b) = (pick(self), pick(other));
            if a.is_empty() || b.is_empty() {
                continue;
            }
            let ((rows, ri), (cols, ci)) = if a.len() >= b.len() { ((self, a), (other, b)) } else { ((other, b), (self, a)) };
            let overlap: Vec<Vec<C<T>>> = ci
                .par_iter()
                .map(|&j| {
                    let wj = cols.weights[j].sqrt();
                    ri.iter().map(|&i| inner(&rows.vectors[i], &cols.vectors[j]) * (wj * rows.weights[i].sqrt())).collect()
                })
                .collect();
            total += nuclear_norm(overlap)?;
        }
        Ok(total.min(T::one()))
    }
}

/// `⟨a|b⟩` with independent partial sums, which lets the loop vectorize.
fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    let mut re = [T::zero(); 4];
    let mut im = [T::zero(); 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: C<T> = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x.conj() * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            re[k] += x[k].re * y[k].re + x[k].im * y[k].im;
            im[k] += x[k].re * y[k].im - x[k].im * y[k].re;
        }
    }
    C::new(re.iter().copied().sum::<T>() + tail.re, im.iter().copied().sum::<T>() + tail.im)
}

/// Basis pairs `(i, n − i)` with both occupations below `c`.
fn block_indices(n: usize, c: usize) -> Vec<(usize, usize)> {
    (n.saturating_sub(c - 1)..=n.min(c - 1)).map(|i| (i, n - i)).collect()
}

/// Beamsplitter restricted to each total-photon-number block `n ≤ 2(c−1)`.
fn beamsplitter_blocks<T: Real>(theta: T, c: usize) -> Result<Vec<CMatrix<T>>> {
    (0..2 * c - 1)
        .map(|n| {
            let idx = block_indices(n, c);
            // h = i(a†b − ab†); exp(-iθh) = exp(θ(a†b − ab†)).
            let h = CMatrix::from_fn(idx.len(), |r, s| {
                let ((i, j), (k, l)) = (idx[r], idx[s]);
                let amp = if i == k + 1 && l == j + 1 {
                    // a†b: (k, l) → (k+1, l−1)
                    T::from_usize(i * l).unwrap().sqrt()
                } else if k == i + 1 && j == l + 1 {
                    -T::from_usize(k * j).unwrap().sqrt()
                } else {
                    T::zero()
                };
                C::new(T::zero(), amp)
            });
            expm_antihermitian(&h, theta)
        })
        .collect()
}

/// The two-mode beamsplitter unitary on `cutoff²` levels, block diagonal in
/// total photon number. Blocks with photon number ≥ cutoff are incomplete,
/// so it is exactly unitary only on the lower blocks.
pub fn fock_beamsplitter<T: Real>(theta: T, cutoff: usize) -> Result<CMatrix<T>> {
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let blocks = beamsplitter_blocks(theta, cutoff)?;
    let mut u = CMatrix::zeros(cutoff * cutoff);
    for (n, b) in blocks.iter().enumerate() {
        let idx = block_indices(n, cutoff);
        for (r, &(i, j)) in idx.iter().enumerate() {
            for (s, &(k, l)) in idx.iter().enumerate() {
                u[(i * cutoff + j, k * cutoff + l)] = b[(r, s)];
            }
        }
    }
    Ok(u)
}

/// Truncated density matrix of a single-mode thermal squeezed state.
pub fn fock_thermal_squeezed<T: Real>(nbar: T, r: T, cfg: &FockConfig) -> Result<DensityMatrix<T>> {
    FockMixture::thermal_squeezed(nbar, r, cfg)?.density()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModePrep<T> {
    pub nbar: T,
    pub r: T,
}

/// Recipe for a test state: independent thermal squeezed modes, then an
/// optional beamsplitter on modes (0, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPrep<T> {
    pub modes: Vec<ModePrep<T>>,
    pub beamsplitter: Option<T>,
}

impl<T: Real> GaussianPrep<T> {
    fn check(&self) -> Result<()> {
        match (self.modes.len(), self.beamsplitter) {
            (1, None) | (2, _) => Ok(()),
            (n, _) => Err(Error::InvalidParameter(format!("oracle supports 1 or 2 modes (beamsplitter on 2), got {n}"))),
        }
    }

    /// Closed-form moments of the recipe.
    pub fn gaussian(&self) -> Result<GaussianState<T>> {
        self.check()?;
        let mut g: Option<GaussianState<T>> = None;
        for m in &self.modes {
            let single = GaussianState::zero_mean(thermal_squeezed_cov(m.nbar, m.r)?)?;
            g = Some(match g {
                None => single,
                Some(acc) => acc.tensor(&single),
            });
        }
        let g = g.expect("checked non-empty");
        match self.beamsplitter {
            Some(theta) => g.apply_passive(&bs_sa(theta), (0, 1)),
            None => Ok(g),
        }
    }

    /// The same recipe in the truncated Fock basis.
    pub fn fock(&self, cfg: &FockConfig) -> Result<FockMixture<T>> {
        self.check()?;
        let mut mix: Option<FockMixture<T>> = None;
        for m in &self.modes {
            let single = FockMixture::thermal_squeezed(m.nbar, m.r, cfg)?;
            mix = Some(match mix {
                None => single,
                Some(acc) => acc.product(&single)?,
            });
        }
        let mix = mix.expect("checked non-empty");
        let mix = match self.beamsplitter {
            Some(theta) => mix.beamsplitter(theta, cfg)?,
            None => mix,
        };
        check_loss(cfg.cutoff, mix.loss, cfg)?;
        Ok(mix)
    }
}

/// Fidelity of two recipes evaluated on truncated Fock states.
pub fn oracle_fidelity<T: Real>(p1: &GaussianPrep<T>, p2: &GaussianPrep<T>, cfg: &FockConfig) -> Result<T> {
    let (a, b) = rayon::join(|| p1.fock(cfg), || p2.fock(cfg));
    a?.fidelity(&b?)
}

/// Rigorous bound on how far truncation can move a fidelity: the gentle
/// measurement estimate `√δ₁ + √δ₂`. In practice the error is of order
/// `δ₁ + δ₂`.
pub fn truncation_bound<T: Real>(a: &FockMixture<T>, b: &FockMixture<T>) -> f64 {
    a.loss.sqrt() + b.loss.sqrt()
}

/// Deterministic set of 30 state pairs spanning one and two modes,
/// `|r| ≤ 0.6` and `n̄ ≤ 0.5`, with and without a beamsplitter.
pub fn validation_pairs() -> Vec<(GaussianPrep<f64>, GaussianPrep<f64>)> {
    let nbars = [0.0, 0.1, 0.25, 0.4, 0.5];
    let rs = [-0.6, -0.3, 0.0, 0.2, 0.45, 0.6];
    let mode = |i: usize| ModePrep { nbar: nbars[i % nbars.len()], r: rs[(i * 7 + 3) % rs.len()] };
    let mut out = Vec::with_capacity(30);
    for i in 0..10 {
        let one = |j: usize| GaussianPrep { modes: vec![mode(j)], beamsplitter: None };
        out.push((one(i), one(i + 11)));
    }
    for i in 0..20 {
        let bs = |j: usize| if j % 3 == 0 { None } else { Some(0.15 * j as f64 - 0.9) };
        let two = |j: usize| GaussianPrep { modes: vec![mode(j), mode(j + 2)], beamsplitter: bs(j) };
        out.push((two(i), two(i + 5)));
    }
    out
}
