//! Property tests for the matrix kernel: trace/determinant/rank/spectral
//! identities checked on random inputs, with nalgebra as an independent
//! oracle for the Jacobi eigenvalue and singular-value routines.

use nalgebra::DMatrix;
use noncoh_core::cxmat::{
    determinant, eig_hermitian, frobenius_norm_sq, hermitian, inverse, matmul, rank,
    singular_values, trace, CMatrix,
};
use noncoh_core::{tol, Complex64};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn to_na(a: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j))
}

/// Strategy for a rows×cols matrix with entries in the unit box.
fn mat(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols)
        .prop_map(move |v| CMatrix::from_vec(rows, cols, v.into_iter().map(|(r, i)| c(r, i)).collect()))
}

fn square(n: usize) -> impl Strategy<Value = CMatrix> {
    mat(n, n)
}

/// Random unitary via nalgebra QR of a random square matrix.
fn unitary(n: usize) -> impl Strategy<Value = CMatrix> {
    square(n).prop_filter_map("needs full rank for QR", |a| {
        let q = to_na(&a).qr().q();
        let u = CMatrix::from_fn(a.rows(), a.cols(), |i, j| q[(i, j)]);
        // QR of a random matrix is unitary unless the input was (nearly) singular.
        let residual = matmul(&hermitian(&u), &u).max_abs_diff(&CMatrix::identity(a.rows()));
        (residual < 1e-10).then_some(u)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matmul_is_associative(a in mat(3, 3), b in mat(3, 3), d in mat(3, 3)) {
        let left = matmul(&matmul(&a, &b), &d);
        let right = matmul(&a, &matmul(&b, &d));
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn hermitian_is_involutive(a in mat(4, 2)) {
        prop_assert!(hermitian(&hermitian(&a)).approx_eq(&a, 0.0));
    }

    #[test]
    fn trace_is_cyclic(a in mat(2, 2), b in mat(2, 2), d in mat(2, 2)) {
        let abc = trace(&matmul(&matmul(&a, &b), &d));
        let cab = trace(&matmul(&matmul(&d, &a), &b));
        prop_assert!((abc - cab).norm() < 1e-12);
    }

    #[test]
    fn trace_plus_hermitian_is_twice_real_part(a in square(3)) {
        let lhs = trace(&a.add(&hermitian(&a)));
        let rhs = 2.0 * trace(&a).re;
        prop_assert!((lhs - c(rhs, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn frobenius_equals_trace_of_gram(a in mat(3, 3)) {
        let gram_trace = trace(&matmul(&hermitian(&a), &a));
        prop_assert!((gram_trace.re - frobenius_norm_sq(&a)).abs() < 1e-12);
        prop_assert!(gram_trace.im.abs() < 1e-12);
    }

    #[test]
    fn determinant_is_multiplicative(a in square(3), b in square(3)) {
        let lhs = determinant(&matmul(&a, &b));
        let rhs = determinant(&a) * determinant(&b);
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn sylvester_determinant_identity(a in mat(2, 3), b in mat(3, 2)) {
        let lhs = determinant(&CMatrix::identity(2).add(&matmul(&a, &b)));
        let rhs = determinant(&CMatrix::identity(3).add(&matmul(&b, &a)));
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn unitary_has_unimodular_determinant(u in unitary(3)) {
        prop_assert!((determinant(&u).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eig_matches_trace_and_determinant(a in square(4)) {
        // A†A is Hermitian PSD; Σλ = tr, Πλ = det, both real.
        let g = matmul(&hermitian(&a), &a);
        let eigs = eig_hermitian(&g).unwrap();
        let sum: f64 = eigs.iter().sum();
        let prod: f64 = eigs.iter().product();
        let tr = trace(&g).re;
        let det = determinant(&g).re;
        prop_assert!((sum - tr).abs() < 1e-9 * (1.0 + tr.abs()));
        prop_assert!((prod - det).abs() < 1e-9 * (1.0 + det.abs()));
    }

    #[test]
    fn eig_of_gram_is_squared_singular_values(a in mat(3, 3)) {
        let g = matmul(&hermitian(&a), &a);
        let eigs = eig_hermitian(&g).unwrap();
        let sv = singular_values(&a);
        for (lambda, sigma) in eigs.iter().zip(&sv) {
            prop_assert!((lambda - sigma * sigma).abs() < 1e-9);
        }
    }

    #[test]
    fn gram_eigen_sum_is_frobenius(a in square(3)) {
        let g = matmul(&hermitian(&a), &a);
        let sum: f64 = eig_hermitian(&g).unwrap().iter().sum();
        prop_assert!((sum - frobenius_norm_sq(&a)).abs() < 1e-9 * (1.0 + sum));
    }

    #[test]
    fn eig_matches_nalgebra(a in square(5)) {
        let h = a.add(&hermitian(&a));
        let ours = eig_hermitian(&h).unwrap();
        let mut oracle: Vec<f64> = to_na(&h).symmetric_eigen().eigenvalues.iter().copied().collect();
        oracle.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (u, v) in ours.iter().zip(&oracle) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_values_match_nalgebra(a in mat(4, 3)) {
        let ours = singular_values(&a);
        let mut oracle: Vec<f64> = to_na(&a).svd(false, false).singular_values.iter().copied().collect();
        oracle.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (u, v) in ours.iter().zip(&oracle) {
            prop_assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_values_recover_planted_diagonal(u in unitary(3), v in unitary(3)) {
        let d = CMatrix::diagonal(&[c(2.5, 0.0), c(1.0, 0.0), c(0.25, 0.0)]);
        let a = matmul(&matmul(&u, &d), &hermitian(&v));
        let sv = singular_values(&a);
        prop_assert!((sv[0] - 2.5).abs() < 1e-10);
        prop_assert!((sv[1] - 1.0).abs() < 1e-10);
        prop_assert!((sv[2] - 0.25).abs() < 1e-10);
    }

    #[test]
    fn rank_of_outer_product_construction(
        u in unitary(4),
        v in unitary(3),
        r in 1usize..=3,
    ) {
        // Exact rank r by construction: r orthonormal outer products.
        let mut a = CMatrix::zeros(4, 3);
        for k in 0..r {
            let uk = CMatrix::from_fn(4, 1, |i, _| u.get(i, k));
            let vk = CMatrix::from_fn(1, 3, |_, j| v.get(j, k).conj());
            a = a.add(&matmul(&uk, &vk));
        }
        prop_assert_eq!(rank(&a, tol::RANK_REL), r);
        let gram = matmul(&hermitian(&a), &a);
        prop_assert_eq!(rank(&gram, tol::RANK_REL), r);
    }

    #[test]
    fn rank_is_invariant_under_full_rank_multiplication(a in mat(4, 3), u in unitary(4), v in unitary(3)) {
        let base = rank(&a, tol::RANK_REL);
        prop_assert_eq!(rank(&matmul(&u, &a), tol::RANK_REL), base);
        prop_assert_eq!(rank(&matmul(&a, &v), tol::RANK_REL), base);
    }

    #[test]
    fn inverse_residual_is_small(a in square(3)) {
        let sv = singular_values(&a);
        prop_assume!(sv[sv.len() - 1] > 1e-3);
        let inv = inverse(&a).unwrap();
        let residual = matmul(&inv, &a).max_abs_diff(&CMatrix::identity(3));
        prop_assert!(residual < 1e-9);
    }
}

#[test]
fn rank_detects_tiny_perturbation_below_tolerance() {
    // A planted zero singular value polluted at 1e-12 must still count as
    // rank-deficient under the 1e-9 relative tolerance.
    let d = CMatrix::diagonal(&[c(1.0, 0.0), c(1e-12, 0.0)]);
    assert_eq!(rank(&d, tol::RANK_REL), 1);
}
