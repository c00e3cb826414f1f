//! The classic construction, which forms `c_j = e^{-x_j/2} Π_{m≠j}(x_j - x_m)`
//! directly, and a variant taking `c_j` from the weighted recurrence without
//! the underflow guard. Both break down as `n` grows; they exist to show
//! where.

use std::fmt;
use std::sync::Arc;

use super::{assemble, DiffMatrix};
use crate::collocation::{NodeSet, ScaledCoeffs};
use crate::eval::modified_recurrence;

/// First non-finite (or vanishing) intermediate of a breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownReport {
    pub stage: &'static str,
    pub row: usize,
    pub col: Option<usize>,
    pub npts: usize,
    pub value: f64,
}

impl fmt::Display for BreakdownReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is {} at index {}", self.stage, self.value, self.row)?;
        if let Some(c) = self.col {
            write!(f, ", {c}")?;
        }
        write!(f, " (npts = {})", self.npts)
    }
}

impl std::error::Error for BreakdownReport {}

/// Products `Π_{m≠j}(x_j - x_m)` and weights `c_j` as computed directly.
pub fn classic_weights(nodes: &NodeSet) -> (Vec<f64>, Vec<f64>) {
    let x = &nodes.nodes;
    let prods: Vec<f64> = (0..x.len())
        .map(|j| {
            x.iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .fold(1.0, |p, (_, xm)| p * (x[j] - xm))
        })
        .collect();
    let c = prods.iter().zip(x).map(|(p, xj)| (-0.5 * xj).exp() * p).collect();
    (prods, c)
}

fn first_bad(values: &[f64], stage: &'static str, npts: usize) -> Result<(), BreakdownReport> {
    match values.iter().position(|v| !v.is_finite() || *v == 0.0) {
        Some(j) => Err(BreakdownReport {
            stage,
            row: j,
            col: None,
            npts,
            value: values[j],
        }),
        None => Ok(()),
    }
}

fn matrix_from_weights(nodes: &Arc<NodeSet>, c: &[f64], order: usize) -> Result<DiffMatrix, BreakdownReport> {
    let x = &nodes.nodes;
    let n = x.len();
    let npts = n;
    let d1 = assemble(n, |k, j| {
        if k == j {
            -0.5 + (0..n).filter(|&i| i != k).map(|i| 1.0 / (x[k] - x[i])).sum::<f64>()
        } else {
            (c[k] / c[j]) / (x[k] - x[j])
        }
    });
    let mut d = DiffMatrix {
        order: 1,
        matrix: d1,
        nodes: Arc::clone(nodes),
    };
    check_entries(&d, npts)?;
    let coeffs = ScaledCoeffs { values: c.to_vec() };
    while d.order < order {
        let l = (d.order + 1) as f64;
        let off = assemble(n, |k, j| {
            if k == j {
                0.0
            } else {
                l / (x[k] - x[j]) * ((coeffs.ratio(k, j)) * d.get(k, k) - d.get(k, j))
            }
        });
        let base = (-0.5f64).powi(d.order as i32 + 1);
        let mut m = off;
        for k in 0..n {
            let s: f64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (0.5 * (x[k] - x[j])).exp() * m[(k, j)])
                .sum();
            m[(k, k)] = base - s;
        }
        d = DiffMatrix {
            order: d.order + 1,
            matrix: m,
            nodes: Arc::clone(nodes),
        };
        check_entries(&d, npts)?;
    }
    Ok(d)
}

fn check_entries(d: &DiffMatrix, npts: usize) -> Result<(), BreakdownReport> {
    let n = d.len();
    match d.matrix.as_slice().iter().position(|v| !v.is_finite()) {
        Some(i) => Err(BreakdownReport {
            stage: "matrix entry",
            row: i / n,
            col: Some(i % n),
            npts,
            value: d.matrix.as_slice()[i],
        }),
        None => Ok(()),
    }
}

/// Matrix from directly computed product weights, or the first intermediate
/// that left the floating-point range.
pub fn classic_construction(nodes: &Arc<NodeSet>, order: usize) -> Result<DiffMatrix, BreakdownReport> {
    let npts = nodes.len();
    let (prods, c) = classic_weights(nodes);
    first_bad(&prods, "node product", npts)?;
    first_bad(&c, "product weight", npts)?;
    matrix_from_weights(nodes, &c, order.max(1))
}

/// `a(x_j) L̂_N'(x_j)` from the recurrence seeded with `e^{-x_j/2}` at every
/// node, with no underflow guard.
pub fn unscaled_coeffs(nodes: &NodeSet) -> Result<ScaledCoeffs, BreakdownReport> {
    let n = nodes.generating_degree;
    let a = nodes.alpha();
    let nf = n as f64;
    let mut values = Vec::with_capacity(nodes.len());
    for &x in &nodes.nodes {
        let v = if x == 0.0 {
            crate::eval::binom_at_zero(n, a)
        } else {
            let w = (-0.5 * x).exp();
            let (l, dl) = modified_recurrence(n, a, x, w);
            let xd = (nf + a) * dl - a * l;
            let deriv = xd / x - 0.5 * l;
            if nodes.family.a_is_x() {
                x * deriv
            } else {
                deriv
            }
        };
        values.push(v);
    }
    first_bad(&values, "weighted derivative", nodes.len())?;
    Ok(ScaledCoeffs { values })
}

/// Matrix from [`unscaled_coeffs`], or the first breakdown.
pub fn derivative_form_construction(nodes: &Arc<NodeSet>, order: usize) -> Result<DiffMatrix, BreakdownReport> {
    let c = unscaled_coeffs(nodes)?;
    matrix_from_weights(nodes, &c.values, order.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collocation::{collocate, NodeFamily};
    use crate::difmat::first_order;

    #[test]
    fn two_point_classic_agrees() {
        let (s, c) = collocate(NodeFamily::augmented_gauss(), 2).unwrap();
        let s = Arc::new(s);
        let stable = first_order(&s, &c).unwrap();
        let classic = classic_construction(&s, 1).unwrap();
        for (a, b) in stable.matrix.as_slice().iter().zip(classic.matrix.as_slice()) {
            assert!((a - b).abs() <= 1e-14 * a.abs());
        }
    }

    #[test]
    fn classic_breaks_at_large_n() {
        let (s, _) = collocate(NodeFamily::augmented_gauss(), 200).unwrap();
        let r = classic_construction(&Arc::new(s), 1).unwrap_err();
        assert_eq!(r.npts, 200);
        assert!(r.to_string().contains("npts = 200"));
    }

    #[test]
    fn derivative_form_survives_moderate_n() {
        let (s, c) = collocate(NodeFamily::augmented_gauss(), 150).unwrap();
        let u = unscaled_coeffs(&s).unwrap();
        for (a, b) in u.values.iter().zip(&c.values) {
            assert!((a - b).abs() <= 1e-10 * b.abs());
        }
    }
}
