#![allow(dead_code)]

use precursor_core::linalg::{CMatrix, RMatrix, C};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C<f64> {
    C::new(re, im)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix<f64> {
    let a = CMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Random density matrix `G G† / Tr` of rank `rank`.
pub fn random_density(rng: &mut impl Rng, n: usize, rank: usize) -> CMatrix<f64> {
    let g: Vec<Vec<C<f64>>> =
        (0..rank).map(|_| (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    let mut m = CMatrix::from_fn(n, |i, j| g.iter().map(|v| v[i] * v[j].conj()).sum());
    let tr = m.trace().re;
    m = m.scale_real(1.0 / tr);
    m.hermitize()
}

pub fn random_pure(rng: &mut impl Rng, n: usize) -> Vec<C<f64>> {
    let v: Vec<C<f64>> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Random Gaussian covariance matrix `S (ν ⊕ ν) Sᵀ` built from passive and
/// squeezing layers, every symplectic eigenvalue at least ½.
pub fn random_cov(rng: &mut impl Rng, modes: usize) -> RMatrix<f64> {
    use precursor_core::cv::{bs_sa, GaussianState};
    let mut g: Option<GaussianState<f64>> = None;
    for _ in 0..modes {
        let single = GaussianState::thermal_squeezed(rng.gen_range(0.0..0.6), rng.gen_range(-0.7..0.7)).unwrap();
        g = Some(match g {
            None => single,
            Some(acc) => acc.tensor(&single),
        });
    }
    let mut g = g.unwrap();
    for i in 0..modes.saturating_sub(1) {
        g = g.apply_passive(&bs_sa(rng.gen_range(-1.5..1.5)), (i, i + 1)).unwrap();
    }
    g.cov().clone()
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (|Δ| = {:e} > {tol:e})", (a - b).abs());
}
