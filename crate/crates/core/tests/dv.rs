mod common;

use common::*;
use precursor_core::dv::*;
use precursor_core::linalg::{kron, CMatrix, C};
use precursor_core::metrics::bures_distance;
use precursor_core::{Error, Window};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn params(theta_sa: f64, theta_aa: f64, p: f64, window: Window, steps: usize) -> DVParams<f64> {
    DVParams { theta_sa, theta_aa, ancilla_excitation: p, window, steps }
}

fn run(alpha: f64, p: &DVParams<f64>, erase: bool) -> Vec<DVChainState<f64>> {
    let mut chain = DVChainState::initial(&dv_initial_system(alpha).unwrap(), p).unwrap();
    let mut out = vec![chain.clone()];
    for _ in 0..p.steps {
        chain = dv_step(&chain, p, erase).unwrap();
        out.push(chain.clone());
    }
    out
}

fn excited_population(chain: &DVChainState<f64>) -> f64 {
    dv_marginal(chain, &[0]).unwrap().matrix()[(1, 1)].re
}

/// Single-excitation amplitudes with ground-state ancillae: the partial swap
/// acts as `[[c, i s], [i s, c]]` on (system, incoming), and the AA collision
/// forwards `i sin θ_AA` of the incoming amplitude to the next ancilla. The
/// AA gate also multiplies `|00⟩` by `e^{iθ_AA}`, which is the branch where
/// the excitation sits in the system.
fn excitation_recurrence(theta_sa: f64, theta_aa: f64, steps: usize) -> Vec<f64> {
    let (s, c) = theta_sa.sin_cos();
    let i = C::new(0.0, 1.0);
    let mut x = C::new(1.0, 0.0);
    let mut e = C::new(0.0, 0.0);
    let mut out = vec![1.0];
    for _ in 0..steps {
        let (nx, ne) = (x * c + i * s * e, i * s * x + e * c);
        x = nx * C::from_polar(1.0, theta_aa);
        e = i * theta_aa.sin() * ne;
        out.push(x.norm_sqr());
    }
    out
}

#[test]
fn partial_swap_is_unitary_and_interpolates_to_swap() {
    for theta in [0.0, 0.4, -1.3, FRAC_PI_2] {
        let u = partial_swap(theta);
        assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }
    assert_eq!(partial_swap(0.0), CMatrix::identity(4));
    // At π/2 the gate is i·SWAP.
    let u = partial_swap(FRAC_PI_2);
    let a = CMatrix::from_real(2, &[0.9, 0.1, 0.1, 0.1]).unwrap();
    let b = CMatrix::from_real_diag(&[0.3, 0.7]);
    let swapped = &(&u * &kron(&a, &b)) * &u.adjoint();
    assert!(swapped.max_abs_diff(&kron(&b, &a)) < 1e-15);
}

#[test]
fn initial_states() {
    let rho = dv_initial_system(0.6).unwrap();
    assert_close(rho.matrix()[(0, 0)].re, 0.36, 1e-15, "ground population");
    assert_close(rho.matrix()[(0, 1)].re, 0.48, 1e-15, "coherence");
    assert_close(rho.purity(), 1.0, 1e-15, "pure");
    assert!(matches!(dv_initial_system(1.2), Err(Error::InvalidParameter(_))));
    let anc = dv_ancilla(0.25).unwrap();
    assert_eq!(anc.matrix()[(1, 1)].re, 0.25);
    assert!(dv_ancilla(1.5).is_err());
    assert!(dv_ancilla(f64::NAN).is_err());
}

#[test]
fn first_collision_population() {
    let theta = 0.7_f64;
    let chains = run(0.0, &params(theta, 0.9, 0.0, Window::Fixed(2), 1), false);
    assert_close(excited_population(&chains[1]), theta.cos().powi(2), 1e-14, "cos²θ");
}

#[test]
fn markovian_decay() {
    let (theta, alpha) = (0.4_f64, 0.3_f64);
    for (n, chain) in run(alpha, &params(theta, 0.0, 0.0, Window::Fixed(2), 10), false).iter().enumerate() {
        let want = (1.0 - alpha * alpha) * theta.cos().powi(2 * n as i32);
        assert_close(excited_population(chain), want, 1e-14, "cos^2n θ decay");
    }
}

#[test]
fn non_markovian_population_follows_the_recurrence() {
    let (tsa, taa) = (0.45, 1.1);
    let want = excitation_recurrence(tsa, taa, 12);
    for window in [Window::Fixed(2), Window::Fixed(4), Window::Full] {
        let steps = if window == Window::Full { 8 } else { 12 };
        for (n, chain) in run(0.0, &params(tsa, taa, 0.0, window, steps), false).iter().enumerate() {
            assert_close(excited_population(chain), want[n], 1e-13, "single-excitation amplitude");
        }
    }
}

#[test]
fn window_bookkeeping() {
    let chains = run(0.5, &params(0.3, 0.4, 0.1, Window::Fixed(3), 6), false);
    let ancillas: Vec<usize> = chains.iter().map(DVChainState::ancillas).collect();
    assert_eq!(ancillas, [1, 2, 3, 3, 3, 3, 3]);
    assert_eq!(chains[6].discarded, 4);
    assert_eq!(chains[6].state.space(), &chain_space(3));
    let full = run(0.5, &params(0.3, 0.4, 0.1, Window::Full, 5), false);
    assert_eq!(full[5].ancillas(), 6);
    assert_eq!(full[5].discarded, 0);
}

#[test]
fn full_history_chain_stays_pure() {
    for chain in run(0.8, &params(0.5, 1.2, 0.0, Window::Full, 7), false) {
        assert_close(chain.state.purity(), 1.0, 1e-12, "global purity");
    }
}

#[test]
fn erasure_leaves_system_uncorrelated() {
    let p = params(0.5, 1.2, 0.1, Window::Fixed(3), 5);
    for chain in run(0.7, &p, true).iter().skip(1) {
        let m = chain.ancillas();
        let system = dv_marginal(chain, &[0]).unwrap();
        let env = dv_marginal(chain, &(1..=m).collect::<Vec<_>>()).unwrap();
        assert!(chain.state.matrix().max_abs_diff(system.tensor(&env).matrix()) < 1e-14);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(params(0.3, 0.3, 0.0, Window::Fixed(1), 5).validate(), Err(Error::InvalidParameter(_))));
    assert!(params(0.3, f64::INFINITY, 0.0, Window::Full, 5).validate().is_err());
    assert!(params(0.3, 0.3, 1.5, Window::Full, 5).validate().is_err());
    assert!(params(0.3, 0.3, 0.0, Window::Full, 0).validate().is_err());
    assert!(params(0.3, 0.3, 0.0, Window::Fixed(2), 5).validate().is_ok());
}

#[test]
fn single_precision_chain() {
    let p = DVParams::<f32> { theta_sa: 0.45, theta_aa: 1.1, ancilla_excitation: 0.0, window: Window::Fixed(3), steps: 8 };
    let mut chain = DVChainState::initial(&dv_initial_system(0.0f32).unwrap(), &p).unwrap();
    for _ in 0..p.steps {
        chain = dv_step(&chain, &p, false).unwrap();
    }
    let want = excitation_recurrence(0.45, 1.1, 8)[8] as f32;
    assert!((dv_marginal(&chain, &[0]).unwrap().matrix()[(1, 1)].re - want).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_preserve_trace_and_hermiticity(
        alpha in -1.0f64..1.0,
        tsa in -3.0f64..3.0,
        taa in -3.0f64..3.0,
        p in 0.0f64..1.0,
        erase in any::<bool>(),
    ) {
        for chain in run(alpha, &params(tsa, taa, p, Window::Fixed(3), 6), erase) {
            let m = chain.state.matrix();
            prop_assert!((m.trace().re - 1.0).abs() < 1e-13);
            prop_assert!(m.hermiticity_error() < 1e-15);
        }
    }

    #[test]
    fn steps_never_increase_distinguishability(
        a1 in -1.0f64..1.0,
        a2 in -1.0f64..1.0,
        tsa in -1.5f64..1.5,
        taa in -1.5f64..1.5,
        p in 0.0f64..0.5,
    ) {
        let par = params(tsa, taa, p, Window::Fixed(2), 6);
        let (r1, r2) = (run(a1, &par, false), run(a2, &par, false));
        let d: Vec<f64> = r1.iter().zip(&r2)
            .map(|(x, y)| bures_distance(x.state.matrix(), y.state.matrix()).unwrap())
            .collect();
        for pair in d.windows(2) {
            prop_assert!(pair[1] <= pair[0] + 1e-9, "{} -> {}", pair[0], pair[1]);
        }
    }
}
