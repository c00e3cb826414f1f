//! Dense solve and eigenvalue kernels.

use laguerre_difmat::linalg::{eig_generalized_diag, lu_solve, norm_inf, DenseMatrix};
use proptest::prelude::*;

/// `(I - 2 v vᵀ / vᵀv) M`.
fn reflect_rows(v: &[f64], m: &mut DenseMatrix) {
    let vv: f64 = v.iter().map(|a| a * a).sum();
    for j in 0..m.cols() {
        let s: f64 = (0..m.rows()).map(|i| v[i] * m[(i, j)]).sum::<f64>() * 2.0 / vv;
        for i in 0..m.rows() {
            m[(i, j)] -= s * v[i];
        }
    }
}

/// `H₁ diag(σ) H₂` with singular values spread geometrically from 1 to `1/kappa`.
fn with_condition(n: usize, kappa: f64, u: &[f64], w: &[f64]) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        m[(i, i)] = kappa.powf(-t);
    }
    reflect_rows(u, &mut m);
    let mut t = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            t[(i, j)] = m[(j, i)];
        }
    }
    reflect_rows(w, &mut t);
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = t[(j, i)];
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_solves_are_backward_stable(
        entries in prop::collection::vec(-1.0..1.0f64, 50 * 50),
        b in prop::collection::vec(-1.0..1.0f64, 50),
    ) {
        let n = 50;
        let mut a = DenseMatrix::from_row_major(n, n, entries).unwrap();
        for i in 0..n {
            a[(i, i)] += 10.0;
        }
        let x = lu_solve(&a, &b).unwrap();
        let ax = a.matvec(&x);
        let r: Vec<f64> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
        let bound = 10.0 * n as f64 * f64::EPSILON * (a.norm_inf() * norm_inf(&x) + norm_inf(&b));
        prop_assert!(norm_inf(&r) <= bound, "{} > {}", norm_inf(&r), bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn conditioned_systems_recover_the_solution(
        n in 2usize..=500,
        log_kappa in 0.0..=6.0f64,
        seed in prop::collection::vec(-1.0..1.0f64, 3 * 500),
    ) {
        let (u, rest) = seed.split_at(500);
        let (w, x) = rest.split_at(500);
        let a = with_condition(n, 10f64.powf(log_kappa), &u[..n], &w[..n]);
        let x = &x[..n];
        let b = a.matvec(x);
        let got = lu_solve(&a, &b).unwrap();
        let err: Vec<f64> = got.iter().zip(x).map(|(p, q)| p - q).collect();
        let rel = norm_inf(&err) / norm_inf(x);
        prop_assert!(rel <= 1e-10, "n={} kappa=1e{:.2}: {:e}", n, log_kappa, rel);
    }
}

#[test]
fn two_by_two_by_hand() {
    let a = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
    let x = lu_solve(&a, &[3.0, 5.0]).unwrap();
    assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);

    let a = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 6.0]]).unwrap();
    let e = eig_generalized_diag(&a, &[1.0, 2.0], 2).unwrap();
    assert!((e[0].value - 2.0).abs() < 1e-14 && (e[1].value - 3.0).abs() < 1e-14);

    let a = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
    let e = eig_generalized_diag(&a, &[1.0; 3], 1).unwrap();
    assert_eq!(e.len(), 1);
    assert!((e[0].value - 1.0).abs() < 1e-15);
}

#[test]
fn identity_system_returns_rhs() {
    let b: Vec<f64> = (0..20).map(|i| i as f64 - 7.5).collect();
    assert_eq!(lu_solve(&DenseMatrix::identity(20), &b).unwrap(), b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `A = diag(d) (S T S)ᵀ` with `S` a reflection and `T` upper triangular,
    /// so `diag(d)⁻¹ A` has eigenvalues `1, 2, ..., n`.
    #[test]
    fn every_returned_pair_has_small_residual(
        n in 2usize..=60,
        upper in prop::collection::vec(-1.0..1.0f64, 60 * 60),
        d in prop::collection::vec(0.1..10.0f64, 60),
        count in 1usize..=10,
    ) {
        let mut t = DenseMatrix::zeros(n, n);
        for i in 0..n {
            t[(i, i)] = 1.0 + i as f64;
            for j in i + 1..n {
                t[(i, j)] = upper[i * 60 + j];
            }
        }
        let v: Vec<f64> = (0..n).map(|i| upper[i * 60 + (i + 1) % 60] + 2.0).collect();
        reflect_rows(&v, &mut t);
        let mut tt = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                tt[(i, j)] = t[(j, i)];
            }
        }
        reflect_rows(&v, &mut tt);
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = d[i] * tt[(j, i)];
            }
        }
        let pairs = eig_generalized_diag(&a, &d[..n], count.min(n)).unwrap();
        prop_assert_eq!(pairs.len(), count.min(n));
        for (k, p) in pairs.iter().enumerate() {
            prop_assert!((p.value - (k + 1) as f64).abs() <= 1e-8 * (k + 1) as f64, "eigenvalue {}: {}", k, p.value);
            let ay = a.matvec(&p.vector);
            let r: Vec<f64> = ay.iter().zip(&p.vector).zip(&d).map(|((q, y), w)| q - p.value * w * y).collect();
            let resid = norm_inf(&r) / (a.norm_inf() * norm_inf(&p.vector));
            prop_assert!(resid <= 1e-10, "pair {}: residual {:e}", k, resid);
            prop_assert!((resid - p.residual).abs() <= 1e-14, "reported residual {:e} vs {:e}", p.residual, resid);
        }
    }
}
