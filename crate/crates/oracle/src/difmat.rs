//! Reference differentiation matrices in double-word arithmetic.
//!
//! Off-diagonal entries use the scaled coefficient ratios from
//! [`crate::roots`]. Diagonals are formed from their definitions,
//! `phi_k'(x_k) = S1` and `phi_k''(x_k) = S1^2 - S2` with
//! `S1 = sum 1/(x_k - x_i)` and `S2 = sum 1/(x_k - x_i)^2`, rather than from
//! closed forms, so the library's closed-form diagonals are checked against
//! an independent route.

use crate::dw::DoubleWord;
use crate::roots::{binom_at_zero, oracle_roots, OracleError, OracleRoots};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    StandardGauss,
    AugmentedGauss,
    GaussRadau,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::StandardGauss => "standard-gauss",
            Family::AugmentedGauss => "augmented-gauss",
            Family::GaussRadau => "gauss-radau",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "standard-gauss" => Some(Family::StandardGauss),
            "augmented-gauss" => Some(Family::AugmentedGauss),
            "gauss-radau" => Some(Family::GaussRadau),
            _ => None,
        }
    }

    pub fn default_alpha(self) -> f64 {
        match self {
            Family::GaussRadau => 1.0,
            _ => 0.0,
        }
    }

    pub fn includes_origin(self) -> bool {
        !matches!(self, Family::StandardGauss)
    }
}

/// Nodes and scaled coefficients for one node set.
#[derive(Debug, Clone)]
pub struct OracleNodes {
    pub family: Family,
    pub alpha: f64,
    pub npts: usize,
    pub nodes: Vec<DoubleWord>,
    pub coeffs: Vec<DoubleWord>,
}

impl OracleNodes {
    /// Degree of the Laguerre polynomial whose roots are the interior nodes.
    pub fn degree(&self) -> usize {
        if self.family.includes_origin() {
            self.npts - 1
        } else {
            self.npts
        }
    }

    pub fn nodes_f64(&self) -> Vec<f64> {
        self.nodes.iter().map(|v| v.to_f64()).collect()
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|v| v.to_f64()).collect()
    }
}

pub fn oracle_nodes(family: Family, alpha: f64, npts: usize) -> Result<OracleNodes, OracleError> {
    let origin = family.includes_origin();
    let degree = if origin { npts.saturating_sub(1) } else { npts };
    let r: OracleRoots = oracle_roots(degree, alpha)?;
    Ok(from_roots(family, &r))
}

/// Assembles a node set from precomputed roots of the generating degree.
pub fn from_roots(family: Family, r: &OracleRoots) -> OracleNodes {
    let mut nodes = Vec::with_capacity(r.n + 1);
    let mut coeffs = Vec::with_capacity(r.n + 1);
    if family.includes_origin() {
        nodes.push(DoubleWord::ZERO);
        coeffs.push(binom_at_zero(r.n, r.alpha));
        for (x, d) in r.roots.iter().zip(&r.derivs) {
            nodes.push(*x);
            coeffs.push(*x * *d);
        }
    } else {
        nodes.extend_from_slice(&r.roots);
        coeffs.extend_from_slice(&r.derivs);
    }
    OracleNodes {
        family,
        alpha: r.alpha,
        npts: nodes.len(),
        nodes,
        coeffs,
    }
}

/// Dense row-major double-word matrix.
#[derive(Debug, Clone)]
pub struct OracleMatrix {
    pub n: usize,
    pub entries: Vec<DoubleWord>,
}

impl OracleMatrix {
    pub fn get(&self, k: usize, j: usize) -> DoubleWord {
        self.entries[k * self.n + j]
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|v| v.to_f64()).collect()
    }
}

fn reciprocal_sums(nodes: &[DoubleWord], k: usize) -> (DoubleWord, DoubleWord) {
    let mut s1 = DoubleWord::ZERO;
    let mut s2 = DoubleWord::ZERO;
    for (i, xi) in nodes.iter().enumerate() {
        if i != k {
            let r = (nodes[k] - *xi).recip();
            s1 += r;
            s2 += r * r;
        }
    }
    (s1, s2)
}

/// First-order matrix: D_kk = -1/2 + S1, D_kj = (c_k/c_j)/(x_k - x_j).
pub fn oracle_first_order(on: &OracleNodes) -> OracleMatrix {
    let n = on.nodes.len();
    let x = &on.nodes;
    let c = &on.coeffs;
    let mut entries = vec![DoubleWord::ZERO; n * n];
    for k in 0..n {
        for j in 0..n {
            entries[k * n + j] = if k == j {
                reciprocal_sums(x, k).0 - DoubleWord::from_f64(0.5)
            } else {
                (c[k] / c[j]) / (x[k] - x[j])
            };
        }
    }
    OracleMatrix { n, entries }
}

/// Second-order matrix: diagonal 1/4 - S1 + S1^2 - S2, off-diagonals by
/// one Welfert step from the first-order oracle.
pub fn oracle_second_order(on: &OracleNodes, d1: &OracleMatrix) -> OracleMatrix {
    let n = on.nodes.len();
    let x = &on.nodes;
    let c = &on.coeffs;
    let mut entries = vec![DoubleWord::ZERO; n * n];
    for k in 0..n {
        for j in 0..n {
            entries[k * n + j] = if k == j {
                let (s1, s2) = reciprocal_sums(x, k);
                DoubleWord::from_f64(0.25) - s1 + s1 * s1 - s2
            } else {
                let ratio = c[k] / c[j];
                (ratio * d1.get(k, k) - d1.get(k, j)).mul_f64(2.0) / (x[k] - x[j])
            };
        }
    }
    OracleMatrix { n, entries }
}

/// Entries for derivative order 1 or 2.
pub fn oracle_difmat(on: &OracleNodes, order: usize) -> OracleMatrix {
    let d1 = oracle_first_order(on);
    match order {
        1 => d1,
        2 => oracle_second_order(on, &d1),
        _ => panic!("oracle supports orders 1 and 2, got {order}"),
    }
}

/// Product-form coefficients log2|c_j| and signs, c_j = e^{-x_j/2} prod_{m != j}(x_j - x_m),
/// carried as mantissa * 2^exp. Used to cross-check the derivative route.
pub fn product_coeff_ratios(on: &OracleNodes) -> Vec<DoubleWord> {
    use crate::roots::Scaled;
    let x = &on.nodes;
    let scaled: Vec<Scaled> = (0..x.len())
        .map(|j| {
            let mut m = DoubleWord::ONE;
            let mut e = 0i64;
            for (i, xi) in x.iter().enumerate() {
                if i != j {
                    m *= x[j] - *xi;
                    let ex = m.hi.abs().log2().floor() as i64;
                    if ex.abs() > 400 {
                        m = m.ldexp(-ex as i32);
                        e += ex;
                    }
                }
            }
            let (em, ee) = (-x[j].ldexp(-1)).exp_split();
            Scaled { mant: m, exp: e }.times(Scaled { mant: em, exp: ee })
        })
        .collect();
    // Express all relative to the first coefficient.
    let base = scaled[0];
    scaled
        .iter()
        .map(|s| {
            Scaled {
                mant: s.mant / base.mant,
                exp: s.exp - base.exp,
            }
            .to_dw()
        })
        .collect()
}
