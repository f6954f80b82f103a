mod common;

use common::*;
use precursor_core::linalg::*;
use precursor_core::Error;
use proptest::prelude::*;
use rand::Rng;

fn reconstruct_error(m: &CMatrix<f64>, eig: &HermitianEig<f64>) -> f64 {
    eig.reconstruct(|l| c(l, 0.0)).max_abs_diff(m)
}

#[test]
fn jacobi_and_tridiagonal_agree() {
    let mut r = rng(1);
    for n in [1, 2, 3, 5, 8, 16, 17, 33] {
        let m = random_hermitian(&mut r, n);
        let a = jacobi_eig(&m).unwrap();
        let b = tridiagonal_eig(&m).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_close(*x, *y, 1e-12, "eigenvalue");
        }
        assert!(reconstruct_error(&m, &a) < 1e-12);
        assert!(reconstruct_error(&m, &b) < 1e-12);
        let vals = hermitian_eigenvalues(&m).unwrap();
        for (x, y) in vals.iter().zip(&b.values) {
            assert_close(*x, *y, 1e-12, "eigenvalue-only path");
        }
    }
}

#[test]
fn eigenvectors_are_orthonormal_at_large_dimension() {
    let m = random_hermitian(&mut rng(2), 128);
    let eig = hermitian_eig(&m).unwrap();
    let v = &eig.vectors;
    let gram = &v.adjoint() * v;
    assert!(gram.max_abs_diff(&CMatrix::identity(128)) < 1e-11);
    assert!(reconstruct_error(&m, &eig) < 1e-11);
    assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn degenerate_spectrum() {
    // Projector with a 3-fold degenerate eigenvalue, in a rotated basis.
    let psi = random_pure(&mut rng(3), 20);
    let p = CMatrix::projector(&psi);
    let m = &CMatrix::identity(20) - &p.scale_real(2.0);
    let eig = hermitian_eig(&m).unwrap();
    assert_close(eig.values[0], -1.0, 1e-12, "lowest");
    assert!(eig.values[1..].iter().all(|&l| (l - 1.0).abs() < 1e-12));
}

#[test]
fn real_symmetric_input_has_real_eigenvectors() {
    let m = CMatrix::from_fn(4, |i, j| c(1.0 / (1.0 + i as f64 + j as f64), 0.0));
    let eig = jacobi_eig(&m).unwrap();
    assert!(eig.vectors.as_slice().iter().all(|z| z.im == 0.0));
}

#[test]
fn psd_sqrt_squares_back() {
    let rho = random_density(&mut rng(4), 9, 4);
    let s = psd_sqrt(&rho).unwrap();
    assert!((&s * &s).max_abs_diff(&rho) < 1e-12);
}

#[test]
fn psd_sqrt_rejects_indefinite() {
    let m = CMatrix::from_real_diag(&[1.0, -0.1]);
    assert!(matches!(psd_sqrt(&m), Err(Error::NotPositive(_))));
}

#[test]
fn expm_of_pauli_x() {
    let x = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    let t = 0.3_f64;
    let u = expm_antihermitian(&x, t).unwrap();
    // exp(-i t X) = cos t I − i sin t X
    assert_close(u[(0, 0)].re, t.cos(), 1e-14, "diag");
    assert_close(u[(0, 1)].im, -t.sin(), 1e-14, "offdiag");
}

#[test]
fn kron_dimensions_and_entries() {
    let a = CMatrix::from_real(2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    let b = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    let k = kron(&a, &b);
    assert_eq!(k.dim(), 4);
    assert_eq!(k[(0, 1)], c(1.0, 0.0));
    assert_eq!(k[(2, 3)], c(4.0, 0.0));
    assert_eq!(k[(3, 0)], c(3.0, 0.0));
    assert_eq!(k[(3, 3)], c(0.0, 0.0));
}

#[test]
fn partial_trace_of_product_recovers_factors() {
    let mut r = rng(5);
    let a = random_density(&mut r, 2, 2);
    let b = random_density(&mut r, 3, 2);
    let cc = random_density(&mut r, 2, 1);
    let space = TensorSpace::new(vec![2, 3, 2]).unwrap();
    let abc = kron(&kron(&a, &b), &cc);
    assert!(partial_trace(&abc, &space, &[1, 2]).unwrap().max_abs_diff(&a) < 1e-14);
    assert!(partial_trace(&abc, &space, &[0, 2]).unwrap().max_abs_diff(&b) < 1e-14);
    assert!(partial_trace(&abc, &space, &[1]).unwrap().max_abs_diff(&kron(&a, &cc)) < 1e-14);
}

#[test]
fn partial_trace_rejects_bad_index() {
    let space = TensorSpace::uniform(2, 2);
    let m = CMatrix::<f64>::identity(4);
    assert!(matches!(partial_trace(&m, &space, &[2]), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn tensor_space_rejects_zero_dimension() {
    assert!(TensorSpace::new(vec![2, 0]).is_err());
}

#[test]
fn apply_two_site_matches_embedded_unitary() {
    let mut r = rng(6);
    let space = TensorSpace::uniform(2, 4);
    let rho = random_density(&mut r, 16, 3);
    let h = random_hermitian(&mut r, 4);
    let u = expm_antihermitian(&h, 0.7).unwrap();
    for sites in [(0, 1), (0, 3), (2, 3), (3, 1)] {
        let full = embed_two_site(&u, &space, sites).unwrap();
        let expected = &(&full * &rho) * &full.adjoint();
        let got = apply_two_site(&rho, &u, &space, sites).unwrap();
        assert!(got.max_abs_diff(&expected) < 1e-13, "sites {sites:?}");
    }
}

#[test]
fn real_matrix_factorizations() {
    let cov = random_cov(&mut rng(7), 3);
    let (inv, logdet) = cov.spd_inverse_logdet().unwrap();
    assert!((&inv * &cov).max_abs_diff(&RMatrix::identity(6)) < 1e-12);
    assert_close(logdet, cov.det().ln(), 1e-12, "log det");
    assert_close(cov.log_det_spd().unwrap(), logdet, 1e-13, "log det (Cholesky only)");
    let root = cov.psd_sqrt().unwrap();
    assert!((&root * &root).max_abs_diff(&cov) < 1e-12);
}

#[test]
fn single_precision_eigensolver() {
    let m = CMatrix::<f32>::from_fn(20, |i, j| {
        let x = ((i * 7 + j * 3) % 11) as f32 / 11.0;
        let y = ((i * 3 + j * 7) % 11) as f32 / 11.0;
        C::new(x + y, if i == j { 0.0 } else if i < j { 0.1 } else { -0.1 })
    });
    let eig = hermitian_eig(&m).unwrap();
    assert!(eig.reconstruct(|l| C::new(l, 0.0)).max_abs_diff(&m) < 1e-4);
}

fn sorted_by_parts(mut v: Vec<C<f64>>) -> Vec<C<f64>> {
    v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    v
}

#[test]
fn nonsymmetric_eigenvalues_of_a_rotation_generator() {
    // [[0, -w], [w, 0]] has eigenvalues ±iw.
    let m = RMatrix::new(2, vec![0.0, -0.7, 0.7, 0.0]).unwrap();
    let ev = sorted_by_parts(real_eigenvalues(&m).unwrap());
    assert_close(ev[0].im, -0.7, 1e-15, "lower");
    assert_close(ev[1].im, 0.7, 1e-15, "upper");
    assert!(ev.iter().all(|z| z.re.abs() < 1e-15));
}

#[test]
fn nonsymmetric_eigenvalues_of_a_companion_matrix() {
    // Roots of (x − 1)(x − 2)(x² + 1)(x + 3), expanded below.
    let roots = [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(-3.0, 0.0)];
    // Coefficients of the monic polynomial, highest power first.
    let mut poly = vec![c(1.0, 0.0)];
    for r in roots {
        let mut next = vec![c(0.0, 0.0); poly.len() + 1];
        for (i, a) in poly.iter().enumerate() {
            next[i] += *a;
            next[i + 1] -= *a * r;
        }
        poly = next;
    }
    let n = roots.len();
    let m = RMatrix::from_fn(n, |i, j| if i == 0 { -poly[j + 1].re } else if i == j + 1 { 1.0 } else { 0.0 });
    let got = sorted_by_parts(real_eigenvalues(&m).unwrap());
    let want = sorted_by_parts(roots.to_vec());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).norm() < 1e-12, "{g} vs {w}");
    }
}

#[test]
fn nonsymmetric_solver_agrees_with_symmetric_one() {
    let cov = random_cov(&mut rng(8), 4);
    let mut sym: Vec<f64> = cov.sym_eig().unwrap().0;
    let mut gen: Vec<f64> = real_eigenvalues(&cov).unwrap().iter().map(|z| z.re).collect();
    sym.sort_by(f64::total_cmp);
    gen.sort_by(f64::total_cmp);
    for (a, b) in sym.iter().zip(&gen) {
        assert_close(*a, *b, 1e-12, "symmetric spectrum");
    }
}

#[test]
fn singular_values_match_eigenvalues_of_gram_matrix() {
    let mut r = rng(9);
    let cols: Vec<Vec<C<f64>>> =
        (0..5).map(|_| (0..7).map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()).collect();
    // G†G is the 5×5 Gram matrix of the columns; its eigenvalues are σ².
    let gram = CMatrix::from_fn(5, |i, j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum());
    let mut want: Vec<f64> = hermitian_eig(&gram).unwrap().values.iter().map(|l| l.sqrt()).collect();
    let mut got = singular_values(cols).unwrap();
    want.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(&want) {
        assert_close(*g, *w, 1e-12, "singular value");
    }
}

#[test]
fn tiny_singular_values_keep_relative_accuracy() {
    // Orthogonal columns with norms 1 and 1e-12: the eigenvalue route would
    // lose the small one entirely.
    let cols = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1e-12)]];
    let mut sv = singular_values(cols).unwrap();
    sv.sort_by(f64::total_cmp);
    assert_close(sv[0], 1e-12, 1e-27, "small");
    assert_eq!(nuclear_norm(vec![vec![c(3.0, 0.0), c(0.0, 4.0)]]).unwrap(), 5.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..24) {
        let m = random_hermitian(&mut rng(seed), n);
        let eig = hermitian_eig(&m).unwrap();
        prop_assert!(reconstruct_error(&m, &eig) < 1e-11);
    }

    #[test]
    fn partial_trace_preserves_trace_and_positivity(seed in any::<u64>(), drop in 0usize..3) {
        let space = TensorSpace::new(vec![2, 3, 2]).unwrap();
        let rho = random_density(&mut rng(seed), 12, 3);
        let red = partial_trace(&rho, &space, &[drop]).unwrap();
        prop_assert!((red.trace().re - 1.0).abs() < 1e-13);
        prop_assert!(hermitian_eig(&red).unwrap().min_value() > -1e-13);
    }
}
