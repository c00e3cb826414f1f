//! Differentiation matrices on Laguerre nodes.
//!
//! Off-diagonal entries only ever use ratios `c̃_k / c̃_j` of scaled
//! coefficients. Orders one and two take their diagonals from closed forms.
//! Higher orders use Welfert's recursion with a diagonal that makes the
//! matrix differentiate the weight `e^{-x/2}` exactly.

mod classic;

pub use classic::{
    classic_construction, classic_weights, derivative_form_construction, unscaled_coeffs, BreakdownReport,
};

use std::sync::Arc;

use rayon::prelude::*;

use crate::collocation::{NodeSet, ScaledCoeffs};
use crate::error::{Error, Result};
use crate::glr::largest_root_bound;
use crate::linalg::DenseMatrix;

/// `ln(f64::MAX)`.
const LN_MAX: f64 = 709.782_712_893_384;

/// A dense differentiation matrix of a given order on a node set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrix {
    pub order: usize,
    pub matrix: DenseMatrix,
    pub nodes: Arc<NodeSet>,
}

impl DiffMatrix {
    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.matrix[(k, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.get(k, k)).collect()
    }

    /// Derivative values at the nodes from function values at the nodes.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.matrix.matvec(f)
    }

    /// The matrix for nodes divided by `beta`, i.e. `beta^order * D`.
    pub fn rescaled(&self, beta: f64) -> DenseMatrix {
        self.matrix.scaled(beta.powi(self.order as i32))
    }
}

/// Builds an `n x n` matrix row by row in parallel. Each entry depends only
/// on its indices, so the result does not depend on the schedule.
fn assemble(n: usize, entry: impl Fn(usize, usize) -> f64 + Sync) -> DenseMatrix {
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n.max(1)).enumerate().for_each(|(k, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = entry(k, j);
        }
    });
    DenseMatrix::from_row_major(n, n, data).expect("square storage")
}

fn check_aligned(nodes: &NodeSet, coeffs: &ScaledCoeffs) -> Result<()> {
    if nodes.len() != coeffs.values.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} nodes",
            coeffs.values.len(),
            nodes.len()
        )));
    }
    Ok(())
}

fn check_finite(m: &DenseMatrix, stage: &'static str) -> Result<()> {
    match m.as_slice().iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite { stage, index: i }),
        None => Ok(()),
    }
}

/// First-order matrix with closed-form diagonal.
pub fn first_order(nodes: &Arc<NodeSet>, coeffs: &ScaledCoeffs) -> Result<DiffMatrix> {
    check_aligned(nodes, coeffs)?;
    let x = &nodes.nodes;
    let c = &coeffs.values;
    let a = nodes.alpha();
    let big_n = nodes.generating_degree as f64;
    let origin = nodes.family.includes_origin();
    let matrix = assemble(x.len(), |k, j| {
        if k != j {
            (c[k] / c[j]) / (x[k] - x[j])
        } else if !origin {
            (-1.0 - a) / (2.0 * x[k])
        } else if k == 0 {
            -0.5 - big_n / (a + 1.0)
        } else {
            (1.0 - a) / (2.0 * x[k])
        }
    });
    check_finite(&matrix, "first-order matrix")?;
    Ok(DiffMatrix {
        order: 1,
        matrix,
        nodes: Arc::clone(nodes),
    })
}

/// Second-order matrix with closed-form diagonal.
pub fn second_order(nodes: &Arc<NodeSet>, coeffs: &ScaledCoeffs, d1: &DiffMatrix) -> Result<DiffMatrix> {
    check_aligned(nodes, coeffs)?;
    if d1.order != 1 || d1.len() != nodes.len() {
        return Err(Error::Dimension(
            "second_order needs the first-order matrix of the same nodes".into(),
        ));
    }
    let x = &nodes.nodes;
    let c = &coeffs.values;
    let a = nodes.alpha();
    let big_n = nodes.generating_degree as f64;
    let origin = nodes.family.includes_origin();
    let b = if origin {
        4.0 * (a + 1.0) * (a - 1.0)
    } else {
        4.0 * (a + 1.0) * (a + 2.0)
    };
    let matrix = assemble(x.len(), |k, j| {
        if k != j {
            2.0 / (x[k] - x[j]) * ((c[k] / c[j]) * d1.get(k, k) - d1.get(k, j))
        } else if origin && k == 0 {
            0.25 + big_n * (big_n + a + 1.0) / ((a + 1.0) * (a + 2.0))
        } else {
            let xk = x[k];
            1.0 / 12.0 - (2.0 * (2.0 * big_n + a + 1.0) * xk - b) / (12.0 * xk * xk)
        }
    });
    check_finite(&matrix, "second-order matrix")?;
    Ok(DiffMatrix {
        order: 2,
        matrix,
        nodes: Arc::clone(nodes),
    })
}

/// Largest generating degree whose nodes keep `e^{(x_k - x_j)/2}` finite.
pub fn max_safe_degree(alpha: f64) -> usize {
    let mut n = ((LN_MAX - alpha - 1.0) / 2.0).max(0.0) as usize + 1;
    while n > 0 && largest_root_bound(n, alpha) > 2.0 * LN_MAX {
        n -= 1;
    }
    n
}

/// One step of Welfert's recursion from any order `>= 1`: off-diagonals
/// `ℓ/(x_k - x_j) (c̃_k/c̃_j D_kk - D_kj)` from the previous order, diagonal
/// `(-1/2)^ℓ - Σ_j e^{(x_k - x_j)/2} D_kj`.
pub fn welfert_step(prev: &DiffMatrix, coeffs: &ScaledCoeffs) -> Result<DiffMatrix> {
    let nodes = &prev.nodes;
    check_aligned(nodes, coeffs)?;
    let x = &nodes.nodes;
    let c = &coeffs.values;
    let l = (prev.order + 1) as f64;
    let n = x.len();
    let range_limit = || Error::RangeLimit {
        order: prev.order + 1,
        max_safe_n: max_safe_degree(nodes.alpha()),
    };
    let off = assemble(n, |k, j| {
        if k == j {
            0.0
        } else {
            l / (x[k] - x[j]) * ((c[k] / c[j]) * prev.get(k, k) - prev.get(k, j))
        }
    });
    check_finite(&off, "recursion off-diagonal")?;
    let base = (-0.5f64).powi(prev.order as i32 + 1);
    let diag: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut s = 0.0;
            for j in (0..n).filter(|&j| j != k) {
                let e = (0.5 * (x[k] - x[j])).exp();
                if !e.is_finite() {
                    return f64::INFINITY;
                }
                s += e * off[(k, j)];
            }
            base - s
        })
        .collect();
    if diag.iter().any(|v| !v.is_finite()) {
        return Err(range_limit());
    }
    let mut matrix = off;
    for (k, d) in diag.into_iter().enumerate() {
        matrix[(k, k)] = d;
    }
    Ok(DiffMatrix {
        order: prev.order + 1,
        matrix,
        nodes: Arc::clone(nodes),
    })
}

/// Order `prev.order + 1` for `prev.order >= 2`.
pub fn higher_order(prev: &DiffMatrix, coeffs: &ScaledCoeffs, nodes: &Arc<NodeSet>) -> Result<DiffMatrix> {
    if prev.order < 2 {
        return Err(Error::InvalidParam(format!(
            "higher_order continues from order >= 2, got {}",
            prev.order
        )));
    }
    if !Arc::ptr_eq(&prev.nodes, nodes) && *prev.nodes != **nodes {
        return Err(Error::Dimension("matrix and node set differ".into()));
    }
    welfert_step(prev, coeffs)
}

/// `D_kk = -1/2 - Σ_{j≠k} e^{(x_k - x_j)/2} D_kj` from the off-diagonals of
/// a first-order matrix. Loses accuracy and eventually overflows as `n`
/// grows; kept for comparison with the closed forms.
pub fn negative_sum_diagonal(offdiag: &DiffMatrix) -> Vec<f64> {
    let x = &offdiag.nodes.nodes;
    let n = x.len();
    (0..n)
        .into_par_iter()
        .map(|k| {
            let s: f64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (0.5 * (x[k] - x[j])).exp() * offdiag.get(k, j))
                .sum();
            -0.5 - s
        })
        .collect()
}

/// Per row, `|Σ_j D_kj e^{(x_k - x_j)/2} - (-1/2)^ℓ|` divided by
/// `max_j |D_kj e^{(x_k - x_j)/2}|`. Terms are summed relative to the row
/// maximum in log space, so nothing overflows.
pub fn weight_identity_residuals(d: &DiffMatrix) -> Vec<f64> {
    let x = &d.nodes.nodes;
    let n = x.len();
    let target = (-0.5f64).powi(d.order as i32);
    (0..n)
        .into_par_iter()
        .map(|k| {
            let logs: Vec<(f64, f64)> = (0..n)
                .filter(|&j| d.get(k, j) != 0.0)
                .map(|j| {
                    let v = d.get(k, j);
                    (0.5 * (x[k] - x[j]) + v.abs().ln(), v.signum())
                })
                .collect();
            let m = logs.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
            if !m.is_finite() {
                return target.abs();
            }
            let s: f64 = logs.iter().map(|&(t, sg)| sg * (t - m).exp()).sum();
            (s - target * (-m).exp()).abs()
        })
        .collect()
}

/// Matrix of any order `>= 1` on the given nodes.
pub fn difmat(nodes: &Arc<NodeSet>, coeffs: &ScaledCoeffs, order: usize) -> Result<DiffMatrix> {
    if order == 0 {
        return Err(Error::InvalidParam("derivative order must be >= 1".into()));
    }
    let d1 = first_order(nodes, coeffs)?;
    if order == 1 {
        return Ok(d1);
    }
    let mut d = second_order(nodes, coeffs, &d1)?;
    while d.order < order {
        d = higher_order(&d, coeffs, nodes)?;
    }
    Ok(d)
}
