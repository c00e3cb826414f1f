//! Two model problems on the half-line, discretized on scaled
//! augmented-Gauss nodes `x = x̃ / β`.

use std::fmt;
use std::sync::Arc;

use crate::collocation::{collocate, weighted_interpolant, NodeFamily, NodeSet, ScaledCoeffs};
use crate::difmat::{first_order, second_order, DiffMatrix};
use crate::error::{Error, Result};
use crate::linalg::{eig_generalized_diag, lu_solve, DenseMatrix, EigenPair};

type RealFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// `-u'' + γ u = f` on `[0, ∞)` with `u(0) = 0` and decay at infinity.
pub struct BvpProblem {
    pub gamma: f64,
    pub beta: f64,
    pub forcing: RealFn,
    pub exact: Option<RealFn>,
}

impl fmt::Debug for BvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BvpProblem")
            .field("gamma", &self.gamma)
            .field("beta", &self.beta)
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl BvpProblem {
    /// The problem with exact solution `u = sin(2x) e^{-x/4}`.
    pub fn damped_sine(gamma: f64, beta: f64) -> Self {
        Self {
            gamma,
            beta,
            forcing: Box::new(move |x| {
                (-0.25 * x).exp() * ((4.0 - 1.0 / 16.0 + gamma) * (2.0 * x).sin() + (2.0 * x).cos())
            }),
            exact: Some(Box::new(|x| (2.0 * x).sin() * (-0.25 * x).exp())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BvpSolution {
    /// Physical abscissae `x̃_j / β`.
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    /// Max-norm error at the nodes, when the exact solution is known.
    pub max_error: Option<f64>,
    pub beta: f64,
    pub set: Arc<NodeSet>,
    pub coeffs: ScaledCoeffs,
}

impl BvpSolution {
    /// The weighted interpolant of the solution at a physical abscissa.
    pub fn eval(&self, x: f64) -> Result<f64> {
        weighted_interpolant(&self.set, &self.coeffs, &self.values, self.beta * x)
    }
}

/// Operators `β D¹` and `β² D²` on the scaled nodes.
#[derive(Debug, Clone)]
pub struct ScaledOperators {
    pub nodes: Vec<f64>,
    /// Unscaled nodes and coefficients the operators were built from.
    pub set: Arc<NodeSet>,
    pub coeffs: ScaledCoeffs,
    pub d1: DenseMatrix,
    pub d2: DenseMatrix,
}

/// First- and second-order matrices for `npts` augmented-Gauss nodes,
/// rescaled by `beta`.
pub fn scaled_operators(npts: usize, beta: f64) -> Result<ScaledOperators> {
    if !beta.is_finite() || beta <= 0.0 {
        return Err(Error::InvalidParam(format!("beta must be positive, got {beta}")));
    }
    let (set, coeffs) = collocate(NodeFamily::augmented_gauss(), npts)?;
    let set = Arc::new(set);
    let d1: DiffMatrix = first_order(&set, &coeffs)?;
    let d2 = second_order(&set, &coeffs, &d1)?;
    Ok(ScaledOperators {
        nodes: set.scaled(beta),
        d1: d1.rescaled(beta),
        d2: d2.rescaled(beta),
        set,
        coeffs,
    })
}

/// Solves `(-β² D² + γ I) u = f` with the first row replaced by `u_0 = 0`.
pub fn solve_bvp(p: &BvpProblem, npts: usize) -> Result<BvpSolution> {
    if npts < 3 {
        return Err(Error::TooFewPoints {
            family: "augmented-gauss",
            min: 3,
            npts,
        });
    }
    let ops = scaled_operators(npts, p.beta)?;
    let mut a = ops.d2.scaled(-1.0);
    for i in 0..npts {
        a[(i, i)] += p.gamma;
    }
    // Row 0 becomes u_0 = 0; eliminating that unknown keeps it exactly zero.
    let rhs: Vec<f64> = ops.nodes[1..].iter().map(|&x| (p.forcing)(x)).collect();
    let mut values = vec![0.0];
    values.extend(lu_solve(&a.without(0), &rhs)?);
    let max_error = p.exact.as_ref().map(|u| {
        ops.nodes
            .iter()
            .zip(&values)
            .map(|(&x, v)| (u(x) - v).abs())
            .fold(0.0, f64::max)
    });
    Ok(BvpSolution {
        nodes: ops.nodes,
        values,
        max_error,
        beta: p.beta,
        set: ops.set,
        coeffs: ops.coeffs,
    })
}

/// `-y'' + y = λ q(x) y` with the Woods–Saxon profile
/// `q(x) = 1 / (1 + e^{(x - R)/a})` and `y(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerProblem {
    pub radius: f64,
    pub thickness: f64,
    pub beta: f64,
    pub count: usize,
}

impl Default for SchrodingerProblem {
    fn default() -> Self {
        Self {
            radius: 7.0,
            thickness: 0.6,
            beta: 10.0,
            count: 6,
        }
    }
}

impl SchrodingerProblem {
    pub fn potential(&self, x: f64) -> f64 {
        let z = (x - self.radius) / self.thickness;
        if z > 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + z.exp())
        }
    }
}

/// Eigenvalues of the reduced system, ascending by magnitude. Fails if `q`
/// underflows to zero at the largest scaled node.
pub fn schrodinger_eigs(p: &SchrodingerProblem, npts: usize) -> Result<Vec<EigenPair>> {
    if npts < 10 {
        return Err(Error::TooFewPoints {
            family: "augmented-gauss",
            min: 10,
            npts,
        });
    }
    if p.thickness.is_nan() || p.thickness <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "thickness must be positive, got {}",
            p.thickness
        )));
    }
    let ops = scaled_operators(npts, p.beta)?;
    let mut a = ops.d2.scaled(-1.0);
    for i in 0..npts {
        a[(i, i)] += 1.0;
    }
    let a = a.without(0);
    let q: Vec<f64> = ops.nodes[1..].iter().map(|&x| p.potential(x)).collect();
    if let Some(k) = q.iter().position(|&v| v == 0.0) {
        return Err(Error::Underflow {
            stage: "potential",
            index: k + 1,
        });
    }
    eig_generalized_diag(&a, &q, p.count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_weighted_linear() {
        // u = x e^{-x/2}, -u'' + u = e^{-x/2}(1 + 3x/4)
        let p = BvpProblem {
            gamma: 1.0,
            beta: 1.0,
            forcing: Box::new(|x| (-0.5 * x).exp() * (1.0 + 0.75 * x)),
            exact: Some(Box::new(|x| x * (-0.5 * x).exp())),
        };
        let s = solve_bvp(&p, 30).unwrap();
        assert!(s.max_error.unwrap() < 1e-10, "{:?}", s.max_error);
        assert_eq!(s.values[0], 0.0);
        let mid = s.eval(2.5).unwrap();
        assert!((mid - 2.5 * (-1.25f64).exp()).abs() < 1e-10, "{mid}");
    }

    #[test]
    fn potential_is_logistic() {
        let p = SchrodingerProblem::default();
        for x in [0.0, 7.0, 20.0, 300.0] {
            let q = p.potential(x);
            assert!(q > 0.0 && q < 1.0, "{x}: {q}");
        }
        assert_eq!(p.potential(7.0), 0.5);
        let ops = scaled_operators(200, p.beta).unwrap();
        assert!(ops.nodes.iter().all(|&x| p.potential(x) > 0.0 && p.potential(x) < 1.0));
    }

    #[test]
    fn too_few_points() {
        let p = BvpProblem::damped_sine(2.0, 4.03);
        assert!(solve_bvp(&p, 2).is_err());
        assert!(schrodinger_eigs(&SchrodingerProblem::default(), 9).is_err());
    }
}
