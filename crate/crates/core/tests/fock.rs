mod common;

use common::*;
use precursor_core::cv::{bs_sa, cv_marginal, cv_step, thermal_squeezed_cov, CVChainState, CVParams, GaussianState};
use precursor_core::fock::*;
use precursor_core::linalg::{CMatrix, C};
use precursor_core::metrics::{gaussian_fidelity, uhlmann_fidelity};
use precursor_core::{Error, Window};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn cfg(cutoff: usize) -> FockConfig {
    FockConfig { cutoff, ..FockConfig::default() }
}

/// Cutoff 40 loses up to ~1e-6 of the norm for the strongest test states.
fn coarse() -> FockConfig {
    FockConfig { cutoff: 40, tolerance: 1e-5 }
}

fn single(nbar: f64, r: f64) -> GaussianPrep<f64> {
    GaussianPrep { modes: vec![ModePrep { nbar, r }], beamsplitter: None }
}

fn pair(m1: (f64, f64), m2: (f64, f64), bs: Option<f64>) -> GaussianPrep<f64> {
    GaussianPrep { modes: vec![ModePrep { nbar: m1.0, r: m1.1 }, ModePrep { nbar: m2.0, r: m2.1 }], beamsplitter: bs }
}

fn assert_cov_close(a: &precursor_core::linalg::RMatrix<f64>, b: &precursor_core::linalg::RMatrix<f64>, tol: f64) {
    assert!(a.max_abs_diff(b) < tol, "{a:?}\nvs\n{b:?}");
}

/// Quadrature covariance of a single-mode density matrix.
fn single_mode_cov(rho: &CMatrix<f64>) -> precursor_core::linalg::RMatrix<f64> {
    let n = rho.dim();
    let a = annihilation::<f64>(n);
    let ad = a.adjoint();
    let k = 1.0 / 2f64.sqrt();
    let x = (&a + &ad).scale_real(k);
    let p = (&a - &ad).scale(c(0.0, -k));
    let ops = [x, p];
    let expect = |m: &CMatrix<f64>| (rho * m).trace().re;
    let mean: Vec<f64> = ops.iter().map(expect).collect();
    precursor_core::linalg::RMatrix::from_fn(2, |i, j| {
        let sym = &(&ops[i] * &ops[j]) + &(&ops[j] * &ops[i]);
        0.5 * expect(&sym) - mean[i] * mean[j]
    })
}

#[test]
fn vacuum_is_the_ground_state() {
    let rho = fock_thermal_squeezed(0.0, 0.0, &cfg(10)).unwrap();
    let mut want = CMatrix::zeros(10);
    want[(0, 0)] = c(1.0, 0.0);
    assert!(rho.matrix().max_abs_diff(&want) < 1e-15);
}

#[test]
fn squeezed_vacuum_photon_number() {
    let rho = fock_thermal_squeezed(0.0, 0.5, &cfg(60)).unwrap();
    let n: f64 = (0..60).map(|k| k as f64 * rho.matrix()[(k, k)].re).sum();
    assert_close(n, 0.5f64.sinh().powi(2), 1e-6, "⟨n⟩ = sinh² r");
}

#[test]
fn fock_moments_reproduce_the_covariance() {
    for (nbar, r) in [(0.0, 0.5), (0.5, -0.6), (0.3, 0.2), (0.1, 0.0)] {
        let mix = FockMixture::thermal_squeezed(nbar, r, &cfg(60)).unwrap();
        let (mean, cov) = mix.moments();
        assert!(mean.iter().all(|m: &f64| m.abs() < 1e-12));
        assert_cov_close(&cov, &thermal_squeezed_cov(nbar, r).unwrap(), 1e-6);
        let dense = single_mode_cov(&fock_thermal_squeezed(nbar, r, &cfg(60)).unwrap().matrix().clone());
        assert_cov_close(&dense, &cov, 1e-9);
    }
}

#[test]
fn insufficient_cutoff_is_reported() {
    let err = FockMixture::thermal_squeezed(0.5, 0.6, &cfg(4));
    assert!(matches!(err, Err(Error::InsufficientCutoff { cutoff: 4, .. })));
    assert!(FockConfig { cutoff: 1, tolerance: 1e-8 }.validate().is_err());
    assert!(FockConfig { cutoff: 8, tolerance: 0.0 }.validate().is_err());
    assert!(FockMixture::thermal_squeezed(-0.1, 0.0, &cfg(8)).is_err());
}

#[test]
fn beamsplitter_limits() {
    let cutoff = 8;
    assert!(fock_beamsplitter(0.0, cutoff).unwrap().max_abs_diff(&CMatrix::identity(cutoff * cutoff)) < 1e-14);
    let u = fock_beamsplitter(FRAC_PI_2, cutoff).unwrap();
    // |1,0⟩ has index 1·cutoff + 0 and |0,1⟩ has index 1.
    let image: Vec<C<f64>> = (0..cutoff * cutoff).map(|i| u[(i, cutoff)]).collect();
    assert_close(image[1].norm(), 1.0, 1e-14, "full swap");
    assert_close(image.iter().map(|z| z.norm_sqr()).sum(), 1.0, 1e-14, "norm");
}

#[test]
fn beamsplitter_is_unitary_on_low_photon_numbers() {
    let cutoff = 12;
    let u = fock_beamsplitter(0.7, cutoff).unwrap();
    let low: Vec<usize> = (0..cutoff * cutoff).filter(|i| i / cutoff + i % cutoff <= cutoff / 2).collect();
    for &i in &low {
        for &j in &low {
            let g: C<f64> = (0..cutoff * cutoff).map(|k| u[(k, i)].conj() * u[(k, j)]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - c(want, 0.0)).norm() < 1e-8, "({i}, {j}): {g}");
        }
    }
}

#[test]
fn beamsplitter_moments_follow_the_symplectic_map() {
    for theta in [0.05 * FRAC_PI_2, 0.6, -1.1] {
        let prep = pair((0.0, 0.5), (0.0, 0.0), Some(theta));
        let (mean, cov) = prep.fock(&cfg(40)).unwrap().moments();
        assert!(mean.iter().all(|m: &f64| m.abs() < 1e-12));
        let want = GaussianState::thermal_squeezed(0.0, 0.5)
            .unwrap()
            .tensor(&GaussianState::vacuum(1))
            .apply_passive(&bs_sa(theta), (0, 1))
            .unwrap();
        assert_cov_close(&cov, want.cov(), 1e-6);
    }
}

#[test]
fn one_collision_matches_the_gaussian_step() {
    let theta = 0.05 * FRAC_PI_2;
    let p = CVParams { theta_sa: theta, theta_aa: 0.9 * FRAC_PI_2, ancilla_nbar: 0.0, window: Window::Full, steps: 1 };
    let chain = CVChainState::initial(&GaussianState::thermal_squeezed(0.0, 0.5).unwrap(), &p).unwrap();
    let next = cv_step(&chain, &p, false).unwrap();
    let system = cv_marginal(&next, &[0]).unwrap();
    let (_, fock_cov) = pair((0.0, 0.5), (0.0, 0.0), Some(theta)).fock(&cfg(60)).unwrap().moments();
    assert_cov_close(&fock_cov.select(&[0, 1]), system.cov(), 1e-6);
    let (s, co) = theta.sin_cos();
    let sq = thermal_squeezed_cov(0.0, 0.5).unwrap();
    let expected = precursor_core::linalg::RMatrix::from_fn(2, |i, j| {
        co * co * sq[(i, j)] + if i == j { 0.5 * s * s } else { 0.0 }
    });
    assert_cov_close(system.cov(), &expected, 1e-14);
}

#[test]
fn marginal_matches_the_fock_partial_trace() {
    let prep = pair((0.2, 0.4), (0.1, -0.3), Some(0.8));
    let mix = prep.fock(&cfg(40)).unwrap();
    let g = prep.gaussian().unwrap();
    for mode in [0, 1] {
        let cov = single_mode_cov(&mix.mode_density(mode).unwrap());
        assert_cov_close(&cov, g.marginal(&[mode]).unwrap().cov(), 1e-6);
    }
}

#[test]
fn decorrelated_state_is_the_product_of_fock_marginals() {
    let cutoff = 20;
    let prep = pair((0.1, 0.3), (0.0, -0.2), Some(0.7));
    let g = prep.gaussian().unwrap();
    let product = g.decorrelate(&[0]);
    // Each marginal is diagonal, so it is a thermal squeezed mode again.
    let recipe = |mode: usize| {
        let block = product.cov().select(&[2 * mode, 2 * mode + 1]);
        let (a, b) = (block[(0, 0)], block[(1, 1)]);
        assert!(block[(0, 1)].abs() < 1e-15);
        ((a * b).sqrt() - 0.5, 0.25 * (a / b).ln())
    };
    let decorrelated = pair(recipe(0), recipe(1), None).fock(&cfg(cutoff)).unwrap().density().unwrap();
    let mix = prep.fock(&cfg(cutoff)).unwrap();
    let kron = precursor_core::linalg::kron(&mix.mode_density(0).unwrap(), &mix.mode_density(1).unwrap());
    let f = uhlmann_fidelity(decorrelated.matrix(), &kron).unwrap();
    assert_close(f, 1.0, 1e-6, "decorrelation is the product of marginals");
}

#[test]
fn analytic_fidelities() {
    let vac = single(0.0, 0.0);
    assert_close(oracle_fidelity(&vac, &vac, &cfg(60)).unwrap(), 1.0, 1e-12, "F(vac, vac)");
    let want = 1.0 / 0.5f64.cosh().sqrt();
    assert_close(oracle_fidelity(&vac, &single(0.0, 0.5), &cfg(60)).unwrap(), want, 1e-6, "vacuum vs squeezed");
    // ⟨0|ρ_th|0⟩ = 1/(n̄+1).
    let want = (1.0f64 / 1.5).sqrt();
    let oracle = oracle_fidelity(&single(0.5, 0.0), &vac, &cfg(60)).unwrap();
    assert_close(oracle, want, 1e-6, "thermal vs vacuum");
    let closed = gaussian_fidelity(&single(0.5, 0.0).gaussian().unwrap(), &vac.gaussian().unwrap()).unwrap();
    assert_close(closed, want, 1e-14, "closed form");
}

#[test]
fn two_mode_post_collision_states_agree() {
    let theta = 0.05 * FRAC_PI_2;
    let a = pair((0.0, 0.5), (0.0, 0.0), Some(theta));
    let b = pair((0.0, 0.0), (0.0, 0.0), Some(theta));
    let c = pair((0.3, -0.4), (0.2, 0.1), Some(1.2));
    for (p, q) in [(&a, &b), (&a, &c), (&b, &c)] {
        let oracle = oracle_fidelity(p, q, &cfg(60)).unwrap();
        let closed = gaussian_fidelity(&p.gaussian().unwrap(), &q.gaussian().unwrap()).unwrap();
        assert_close(oracle, closed, 1e-6, "post-collision pair");
    }
}

/// Where the oracle accepts cutoff 40 under the default loss budget, going
/// to 60 moves the fidelity by less than 1e-7. The strongest states lose
/// about 1e-6 of their norm above 40 photons and are refused at 40, but the
/// loss-derived bound still covers the change.
#[test]
fn truncation_converges_between_cutoffs() {
    let mut converged = 0;
    for (p, q) in validation_pairs() {
        let hi = oracle_fidelity(&p, &q, &cfg(60)).unwrap();
        match oracle_fidelity(&p, &q, &cfg(40)) {
            Ok(lo) => {
                assert!((lo - hi).abs() < 1e-7, "cutoff 40 gives {lo}, 60 gives {hi}");
                converged += 1;
            }
            Err(Error::InsufficientCutoff { cutoff: 40, .. }) => {
                let (a, b) = (p.fock(&coarse()).unwrap(), q.fock(&coarse()).unwrap());
                let lo = a.fidelity(&b).unwrap();
                assert!((lo - hi).abs() <= truncation_bound(&a, &b), "{lo} vs {hi}");
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(converged >= 10, "only {converged} pairs fit cutoff 40");
}

#[test]
fn validation_set_spans_the_domain() {
    let pairs = validation_pairs();
    assert_eq!(pairs.len(), 30);
    let modes: Vec<&ModePrep<f64>> = pairs.iter().flat_map(|(a, b)| a.modes.iter().chain(&b.modes)).collect();
    assert!(modes.iter().all(|m| m.r.abs() <= 0.6 && (0.0..=0.5).contains(&m.nbar)));
    assert!(modes.iter().any(|m| m.r.abs() == 0.6 && m.nbar == 0.5));
    assert!(pairs.iter().any(|(a, _)| a.modes.len() == 1) && pairs.iter().any(|(a, _)| a.beamsplitter.is_some()));
}

#[test]
fn truncation_bound_is_reported() {
    let a = FockMixture::thermal_squeezed(0.5, 0.6, &cfg(60)).unwrap();
    let b = FockMixture::thermal_squeezed(0.0, 0.0, &cfg(60)).unwrap();
    assert!(a.truncation_loss() < 1e-8);
    assert!(b.truncation_loss() < 1e-15);
    assert!(truncation_bound(&a, &b) < 1e-4);
}

#[test]
fn single_precision_oracle() {
    let rho = FockMixture::<f32>::thermal_squeezed(0.0, 0.5, &FockConfig { cutoff: 30, tolerance: 1e-4 }).unwrap();
    let (_, cov) = rho.moments();
    let want = thermal_squeezed_cov(0.0f32, 0.5).unwrap();
    assert!(cov.max_abs_diff(&want) < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn single_mode_oracle_agrees_with_closed_form(
        n1 in 0.0f64..0.5, r1 in -0.6f64..0.6, n2 in 0.0f64..0.5, r2 in -0.6f64..0.6,
    ) {
        let (p, q) = (single(n1, r1), single(n2, r2));
        let oracle = oracle_fidelity(&p, &q, &cfg(60)).unwrap();
        let closed = gaussian_fidelity(&p.gaussian().unwrap(), &q.gaussian().unwrap()).unwrap();
        prop_assert!((oracle - closed).abs() < 1e-6, "{oracle} vs {closed}");
    }

    #[test]
    fn oracle_fidelity_is_symmetric_and_bounded(n1 in 0.0f64..0.5, r1 in -0.6f64..0.6, r2 in -0.6f64..0.6) {
        let (p, q) = (single(n1, r1), single(0.1, r2));
        let f = oracle_fidelity(&p, &q, &coarse()).unwrap();
        let g = oracle_fidelity(&q, &p, &coarse()).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - g).abs() < 1e-12);
    }
}
