//! Differentiation matrices against the oracle and their structural identities.

use std::sync::Arc;

use laguerre_difmat::collocation::{collocate, FamilyTag, NodeFamily, NodeSet, ScaledCoeffs};
use laguerre_difmat::difmat::{
    classic_construction, difmat, first_order, max_safe_degree, negative_sum_diagonal, second_order,
    weight_identity_residuals, welfert_step, DiffMatrix,
};
use laguerre_difmat::Error;
use laguerre_oracle::{oracle_difmat, oracle_nodes, Family};
use proptest::prelude::*;

fn built(tag: FamilyTag, npts: usize) -> (Arc<NodeSet>, ScaledCoeffs) {
    let (s, c) = collocate(NodeFamily::from_tag(tag), npts).unwrap();
    (Arc::new(s), c)
}

fn oracle_matrix(tag: FamilyTag, npts: usize, order: usize) -> Vec<f64> {
    let fam = Family::from_tag(tag.as_str()).unwrap();
    let on = oracle_nodes(fam, fam.default_alpha(), npts).unwrap();
    oracle_difmat(&on, order).to_f64()
}

fn max_off_diagonal_error(d: &DiffMatrix, reference: &[f64]) -> f64 {
    let n = d.len();
    let mut worst = 0.0f64;
    for k in 0..n {
        for j in (0..n).filter(|&j| j != k) {
            let r = reference[k * n + j];
            worst = worst.max(((d.get(k, j) - r) / r).abs());
        }
    }
    worst
}

/// `|Df - f'|` at node `k` divided by `Σ_j |D_kj f_j| + |f'_k|`, the size of
/// the rounding that evaluating the sum in double precision can produce.
/// Diagonals built as weighted negative sums also carry
/// `|f_k| Σ_j |e^{(x_k - x_j)/2} D_kj|`.
fn backward_errors(d: &DiffMatrix, f: &[f64], df: &[f64]) -> Vec<f64> {
    let got = d.apply(f);
    let x = &d.nodes.nodes;
    (0..d.len())
        .map(|k| {
            let mut scale: f64 = (0..d.len()).map(|j| (d.get(k, j) * f[j]).abs()).sum::<f64>() + df[k].abs();
            if d.order > 2 {
                let s: f64 = (0..d.len())
                    .filter(|&j| j != k)
                    .map(|j| ((0.5 * (x[k] - x[j])).exp() * d.get(k, j)).abs())
                    .sum();
                scale += f[k].abs() * s;
            }
            if scale == 0.0 {
                0.0
            } else {
                (got[k] - df[k]).abs() / scale
            }
        })
        .collect()
}

/// `e^{-x/2} x^m` and its derivatives up to third order.
fn weighted_monomial(m: i32, x: f64) -> [f64; 4] {
    let p = |k: i32| -> f64 {
        // k-th derivative of x^m
        if k > m {
            return 0.0;
        }
        let falling: f64 = (0..k).map(|i| (m - i) as f64).product();
        falling * x.powi(m - k)
    };
    let w = (-0.5 * x).exp();
    [
        w * p(0),
        w * (p(1) - 0.5 * p(0)),
        w * (p(2) - p(1) + 0.25 * p(0)),
        w * (p(3) - 1.5 * p(2) + 0.75 * p(1) - 0.125 * p(0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn first_order_rows_differentiate_the_weight(
        tag in prop::sample::select(FamilyTag::ALL.to_vec()),
        npts in 2usize..=1000,
    ) {
        let (s, c) = built(tag, npts);
        let d = first_order(&s, &c).unwrap();
        for (k, r) in weight_identity_residuals(&d).into_iter().enumerate() {
            prop_assert!(r <= 1e-12 * npts as f64, "{} npts={} row {}: {:e}", tag, npts, k, r);
        }
    }

    #[test]
    fn weighted_monomials_are_differentiated_to_rounding(
        tag in prop::sample::select(FamilyTag::ALL.to_vec()),
        npts in 10usize..=500,
        m in 0i32..=8,
    ) {
        let (s, c) = built(tag, npts);
        let d = first_order(&s, &c).unwrap();
        let f: Vec<f64> = s.nodes.iter().map(|&x| weighted_monomial(m, x)[0]).collect();
        let df: Vec<f64> = s.nodes.iter().map(|&x| weighted_monomial(m, x)[1]).collect();
        for (k, e) in backward_errors(&d, &f, &df).into_iter().enumerate() {
            prop_assert!(e <= 1e-13, "{} npts={} m={} node {}: {:e}", tag, npts, m, k, e);
        }
    }
}

#[test]
fn small_weighted_monomials_are_differentiated_to_relative_accuracy() {
    for tag in FamilyTag::ALL {
        let (s, c) = built(tag, 20);
        let d = first_order(&s, &c).unwrap();
        for m in 0..=4 {
            let f: Vec<f64> = s.nodes.iter().map(|&x| weighted_monomial(m, x)[0]).collect();
            let got = d.apply(&f);
            for (k, &x) in s.nodes.iter().enumerate().filter(|(_, &x)| x < 20.0) {
                let want = weighted_monomial(m, x)[1];
                let tol = 1e-10 * want.abs().max(1e-3 * (-0.5 * x).exp());
                assert!((got[k] - want).abs() <= tol, "{tag} m={m} x={x}: {} vs {want}", got[k]);
            }
        }
    }
}

#[test]
fn higher_orders_differentiate_weighted_monomials() {
    for tag in [FamilyTag::AugmentedGauss, FamilyTag::StandardGauss] {
        let (s, c) = built(tag, 40);
        for order in [2usize, 3] {
            let d = difmat(&s, &c, order).unwrap();
            for m in 0..=6 {
                let f: Vec<f64> = s.nodes.iter().map(|&x| weighted_monomial(m, x)[0]).collect();
                let df: Vec<f64> = s.nodes.iter().map(|&x| weighted_monomial(m, x)[order]).collect();
                let worst = backward_errors(&d, &f, &df).into_iter().fold(0.0, f64::max);
                assert!(worst <= 1e-12, "{tag} order={order} m={m}: {worst:e}");
            }
        }
    }
}

#[test]
fn second_order_off_diagonals_match_oracle() {
    for tag in FamilyTag::ALL {
        for npts in [20, 150, 300] {
            let (s, c) = built(tag, npts);
            let d = difmat(&s, &c, 2).unwrap();
            let e = max_off_diagonal_error(&d, &oracle_matrix(tag, npts, 2));
            assert!(e <= 1e-10, "{tag} npts={npts}: {e:e}");
        }
    }
}

#[test]
fn first_order_matches_oracle_including_radau_diagonal() {
    for tag in FamilyTag::ALL {
        for npts in [5, 100, 400] {
            let (s, c) = built(tag, npts);
            let d = first_order(&s, &c).unwrap();
            let reference = oracle_matrix(tag, npts, 1);
            assert!(max_off_diagonal_error(&d, &reference) <= 1e-11);
            for k in 0..npts {
                let (got, want) = (d.get(k, k), reference[k * npts + k]);
                // The Radau interior diagonal is exactly zero.
                assert!(
                    (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                    "{tag} npts={npts} k={k}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn recursion_matches_second_order_off_diagonals() {
    for npts in [10, 100, 200] {
        let (s, c) = built(FamilyTag::AugmentedGauss, npts);
        let d1 = first_order(&s, &c).unwrap();
        let direct = second_order(&s, &c, &d1).unwrap();
        let recursed = welfert_step(&d1, &c).unwrap();
        for k in 0..npts {
            for j in (0..npts).filter(|&j| j != k) {
                let (a, b) = (direct.get(k, j), recursed.get(k, j));
                assert!((a - b).abs() <= 1e-12 * b.abs());
            }
        }
    }
}

#[test]
fn classic_breakdown_first_occurs_between_100_and_160() {
    let first = (60..=200)
        .find(|&npts| classic_construction(&built(FamilyTag::AugmentedGauss, npts).0, 1).is_err())
        .expect("classic construction never broke down");
    assert!((100..=160).contains(&first), "first breakdown at {first}");
}

#[test]
fn origin_row_negative_sum_stays_finite() {
    for npts in [10, 500, 1000] {
        let (s, c) = built(FamilyTag::AugmentedGauss, npts);
        let d = first_order(&s, &c).unwrap();
        let ns = negative_sum_diagonal(&d);
        assert!(ns[0].is_finite());
        assert!(((ns[0] - d.get(0, 0)) / d.get(0, 0)).abs() <= 1e-10);
    }
}

#[test]
fn third_order_reports_range_limit_past_safe_degree() {
    let safe = max_safe_degree(0.0);
    let (s, c) = built(FamilyTag::AugmentedGauss, safe + 1);
    assert!(difmat(&s, &c, 3).is_ok());
    let (s, c) = built(FamilyTag::AugmentedGauss, safe + 40);
    assert!(matches!(difmat(&s, &c, 3), Err(Error::RangeLimit { order: 3, .. })));
}

#[test]
fn assembly_is_independent_of_thread_count() {
    let (s, c) = built(FamilyTag::AugmentedGauss, 300);
    let build = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let d1 = first_order(&s, &c).unwrap();
            let d2 = second_order(&s, &c, &d1).unwrap();
            let d3 = welfert_step(&d2, &c).unwrap();
            let ns = negative_sum_diagonal(&d1);
            (d1, d2, d3, ns)
        })
    };
    let one = build(1);
    for threads in [2, 3, 8] {
        let other = build(threads);
        let bits = |m: &DiffMatrix| m.matrix.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&one.0), bits(&other.0));
        assert_eq!(bits(&one.1), bits(&other.1));
        assert_eq!(bits(&one.2), bits(&other.2));
        assert!(one.3.iter().zip(&other.3).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
