//! Convergence and structural properties of the two half-line problems.

use laguerre_difmat::collocation::weighted_interpolant;
use laguerre_difmat::solvers::{scaled_operators, schrodinger_eigs, solve_bvp, BvpProblem, SchrodingerProblem};
use laguerre_difmat::Error;

fn manufactured(beta: f64) -> BvpProblem {
    // u = x e^{-x/2}, -u'' + u = e^{-x/2}(1 + 3x/4)
    BvpProblem {
        gamma: 1.0,
        beta,
        forcing: Box::new(|x| (-0.5 * x).exp() * (1.0 + 0.75 * x)),
        exact: Some(Box::new(|x| x * (-0.5 * x).exp())),
    }
}

#[test]
fn bvp_log_error_is_convex_and_decreasing() {
    let p = BvpProblem::damped_sine(2.0, 4.03);
    let logs: Vec<f64> = [40, 80, 120, 160, 200]
        .iter()
        .map(|&n| solve_bvp(&p, n).unwrap().max_error.unwrap().log10())
        .collect();
    for w in logs.windows(2) {
        assert!(w[1] < w[0], "{logs:?}");
    }
    for w in logs.windows(3) {
        assert!(w[2] - 2.0 * w[1] + w[0] >= 0.0, "{logs:?}");
    }
}

#[test]
fn boundary_value_is_exactly_zero() {
    for npts in [3, 40, 230] {
        let s = solve_bvp(&BvpProblem::damped_sine(2.0, 4.03), npts).unwrap();
        assert_eq!(s.values[0], 0.0);
        assert_eq!(s.nodes[0], 0.0);
        assert_eq!(s.eval(0.0).unwrap(), 0.0);
    }
}

#[test]
fn ground_state_differences_shrink_tenfold_per_thirty_nodes() {
    let p = SchrodingerProblem::default();
    let lambda: Vec<f64> = [10, 40, 70, 100, 130]
        .iter()
        .map(|&n| schrodinger_eigs(&p, n).unwrap()[0].value)
        .collect();
    let diffs: Vec<f64> = lambda.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    for w in diffs.windows(2) {
        if w[0] <= 1e-10 {
            break;
        }
        assert!(w[1] <= 0.1 * w[0], "{diffs:?}");
    }
}

#[test]
fn eigenpairs_have_small_residuals() {
    let p = SchrodingerProblem::default();
    let pairs = schrodinger_eigs(&p, 200).unwrap();
    assert_eq!(pairs.len(), 6);
    for e in &pairs {
        assert!(e.residual < 1e-10, "{e:?}");
    }
    assert!(pairs.windows(2).all(|w| w[0].value.abs() <= w[1].value.abs()));
}

#[test]
fn potential_lies_strictly_between_zero_and_one_at_the_nodes() {
    for beta in [4.03, 10.0] {
        let p = SchrodingerProblem {
            beta,
            ..SchrodingerProblem::default()
        };
        let ops = scaled_operators(200, beta).unwrap();
        for &x in &ops.nodes {
            let q = p.potential(x);
            assert!(q > 0.0 && q < 1.0, "beta={beta} x={x}: {q}");
        }
    }
}

#[test]
fn underflowing_potential_is_reported() {
    // At beta = 1 the largest node is near 780 and q underflows to zero.
    let p = SchrodingerProblem {
        beta: 1.0,
        ..SchrodingerProblem::default()
    };
    assert!(matches!(
        schrodinger_eigs(&p, 200),
        Err(Error::Underflow { stage: "potential", .. })
    ));
}

/// Solutions at `β` and `2β` agree to within the error of interpolating the
/// exact solution from each node set.
#[test]
fn solutions_are_covariant_under_rescaling() {
    let npts = 60;
    let u = |x: f64| x * (-0.5 * x).exp();
    let xs: Vec<f64> = (1..=120).map(|i| 0.1 * i as f64).collect();
    for beta in [1.0, 2.0] {
        let a = solve_bvp(&manufactured(beta), npts).unwrap();
        let b = solve_bvp(&manufactured(2.0 * beta), npts).unwrap();
        let interp_error = |s: &laguerre_difmat::solvers::BvpSolution| {
            let samples: Vec<f64> = s.nodes.iter().map(|&x| u(x)).collect();
            xs.iter()
                .map(|&x| (weighted_interpolant(&s.set, &s.coeffs, &samples, s.beta * x).unwrap() - u(x)).abs())
                .fold(0.0, f64::max)
        };
        let tol = 10.0 * (interp_error(&a) + interp_error(&b)) + 1e-12;
        let gap = xs
            .iter()
            .map(|&x| (a.eval(x).unwrap() - b.eval(x).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(gap <= tol, "beta={beta}: gap {gap:e} vs {tol:e}");
    }
}
