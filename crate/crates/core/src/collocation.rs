//! Node families and their scaled coefficients.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{binom_at_zero, eval_function_modified, LaguerreParam};
use crate::glr::{sweep_roots, RootSweepResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    /// Roots of `L_n^(α)`.
    StandardGauss,
    /// The origin plus the roots of `L_{n-1}^(α)`.
    AugmentedGauss,
    /// The origin plus the roots of `L_{n-1}^(1)`.
    GaussRadau,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 3] = [
        FamilyTag::StandardGauss,
        FamilyTag::AugmentedGauss,
        FamilyTag::GaussRadau,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyTag::StandardGauss => "standard-gauss",
            FamilyTag::AugmentedGauss => "augmented-gauss",
            FamilyTag::GaussRadau => "gauss-radau",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown node family `{s}`")))
    }
}

/// A node family with its Laguerre parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeFamily {
    tag: FamilyTag,
    alpha: f64,
}

impl NodeFamily {
    pub fn standard_gauss() -> Self {
        Self {
            tag: FamilyTag::StandardGauss,
            alpha: 0.0,
        }
    }

    pub fn augmented_gauss() -> Self {
        Self {
            tag: FamilyTag::AugmentedGauss,
            alpha: 0.0,
        }
    }

    pub fn gauss_radau() -> Self {
        Self {
            tag: FamilyTag::GaussRadau,
            alpha: 1.0,
        }
    }

    /// Family with its default α.
    pub fn from_tag(tag: FamilyTag) -> Self {
        match tag {
            FamilyTag::StandardGauss => Self::standard_gauss(),
            FamilyTag::AugmentedGauss => Self::augmented_gauss(),
            FamilyTag::GaussRadau => Self::gauss_radau(),
        }
    }

    /// Overrides α. The Radau family is tied to `α = 1`.
    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        LaguerreParam::new(alpha, 0)?;
        if self.tag == FamilyTag::GaussRadau && alpha != 1.0 {
            return Err(Error::InvalidParam(format!(
                "gauss-radau requires alpha = 1, got {alpha}"
            )));
        }
        Ok(Self { alpha, ..self })
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn includes_origin(&self) -> bool {
        self.tag != FamilyTag::StandardGauss
    }

    /// Whether the interpolation factor is `a(x) = x` rather than `1`.
    pub fn a_is_x(&self) -> bool {
        self.includes_origin()
    }

    pub fn min_points(&self) -> usize {
        if self.includes_origin() {
            2
        } else {
            1
        }
    }
}

/// Ordered collocation nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub family: NodeFamily,
    pub nodes: Vec<f64>,
    /// Degree of the polynomial whose roots are the interior nodes.
    pub generating_degree: usize,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.family.alpha
    }

    /// Nodes that are roots, i.e. all but the origin for augmented families.
    pub fn interior(&self) -> &[f64] {
        if self.family.includes_origin() {
            &self.nodes[1..]
        } else {
            &self.nodes
        }
    }

    /// The same nodes divided by `beta`.
    pub fn scaled(&self, beta: f64) -> Vec<f64> {
        self.nodes.iter().map(|x| x / beta).collect()
    }
}

/// `c̃_j`, aligned with the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCoeffs {
    pub values: Vec<f64>,
}

impl ScaledCoeffs {
    pub fn ratio(&self, k: usize, j: usize) -> f64 {
        self.values[k] / self.values[j]
    }
}

/// Nodes together with the root sweep that produced them.
pub fn build_nodeset_with_sweep(family: NodeFamily, npts: usize) -> Result<(NodeSet, RootSweepResult)> {
    if npts < family.min_points() {
        return Err(Error::TooFewPoints {
            family: family.tag.as_str(),
            min: family.min_points(),
            npts,
        });
    }
    let degree = if family.includes_origin() { npts - 1 } else { npts };
    let sweep = sweep_roots(LaguerreParam::new(family.alpha, degree)?)?;
    let mut nodes = Vec::with_capacity(npts);
    if family.includes_origin() {
        nodes.push(0.0);
    }
    nodes.extend_from_slice(&sweep.roots);
    let set = NodeSet {
        family,
        nodes,
        generating_degree: degree,
    };
    Ok((set, sweep))
}

pub fn build_nodeset(family: NodeFamily, npts: usize) -> Result<NodeSet> {
    build_nodeset_with_sweep(family, npts).map(|(s, _)| s)
}

/// `c̃_j = a(x_j) L̂_N'(x_j)` at the roots and `binom(N + α, N)` at the origin.
pub fn scaled_coeffs(nodes: &NodeSet, derivs: &[f64]) -> Result<ScaledCoeffs> {
    let interior = nodes.interior();
    if derivs.len() != interior.len() {
        return Err(Error::Dimension(format!(
            "{} derivatives for {} interior nodes",
            derivs.len(),
            interior.len()
        )));
    }
    let mut values = Vec::with_capacity(nodes.len());
    if nodes.family.includes_origin() {
        values.push(binom_at_zero(nodes.generating_degree, nodes.alpha()));
    }
    for (i, (&x, &d)) in interior.iter().zip(derivs).enumerate() {
        if d == 0.0 || !d.is_finite() {
            return Err(Error::ZeroDerivative { index: i });
        }
        values.push(if nodes.family.a_is_x() { x * d } else { d });
    }
    if let Some(j) = values.iter().position(|v| !v.is_finite() || *v == 0.0) {
        return Err(Error::NonFinite {
            stage: "scaled coefficients",
            index: j,
        });
    }
    Ok(ScaledCoeffs { values })
}

/// Weighted interpolant `Σ_j f_j e^{-(x - x_j)/2} ℓ_j(x)`, evaluated as
/// `a(x) L̂_N(x) Σ_j f_j / (c̃_j (x - x_j))`. Past the evaluation guard the
/// second barycentric form is used instead.
pub fn weighted_interpolant(nodes: &NodeSet, coeffs: &ScaledCoeffs, values: &[f64], x: f64) -> Result<f64> {
    let xs = &nodes.nodes;
    if values.len() != xs.len() || coeffs.values.len() != xs.len() {
        return Err(Error::Dimension(format!(
            "{} values and {} coefficients for {} nodes",
            values.len(),
            coeffs.values.len(),
            xs.len()
        )));
    }
    if let Some(j) = xs.iter().position(|&xj| xj == x) {
        return Ok(values[j]);
    }
    let terms = xs.iter().zip(&coeffs.values).map(|(&xj, &cj)| 1.0 / (cj * (x - xj)));
    let param = LaguerreParam::new(nodes.alpha(), nodes.generating_degree)?;
    match eval_function_modified(param, x) {
        Ok(e) => {
            let a = if nodes.family.a_is_x() { x } else { 1.0 };
            let s: f64 = terms.zip(values).map(|(t, f)| t * f).sum();
            Ok(a * e.value * s)
        }
        Err(Error::UseTaylorPath { .. }) => {
            let shift = 0.5 * (x - xs[0]);
            let (mut num, mut den) = (0.0, 0.0);
            for ((t, f), &xj) in terms.zip(values).zip(xs) {
                num += f * t;
                den += (0.5 * (x - xj) - shift).exp() * t;
            }
            Ok((-shift).exp() * num / den)
        }
        Err(e) => Err(e),
    }
}

/// Nodes and scaled coefficients in one call.
pub fn collocate(family: NodeFamily, npts: usize) -> Result<(NodeSet, ScaledCoeffs)> {
    let (set, sweep) = build_nodeset_with_sweep(family, npts)?;
    let coeffs = scaled_coeffs(&set, &sweep.derivs)?;
    Ok((set, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tag_round_trip() {
        for t in FamilyTag::ALL {
            assert_eq!(t.as_str().parse::<FamilyTag>().unwrap(), t);
        }
        assert!("chebyshev".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn small_node_sets() {
        assert_eq!(
            build_nodeset(NodeFamily::augmented_gauss(), 2).unwrap().nodes,
            vec![0.0, 1.0]
        );
        let s = build_nodeset(NodeFamily::standard_gauss(), 2).unwrap();
        let r = 2f64.sqrt();
        assert!((s.nodes[0] - (2.0 - r)).abs() < 1e-15);
        assert!((s.nodes[1] - (2.0 + r)).abs() < 1e-14);
        let s = build_nodeset(NodeFamily::gauss_radau(), 2).unwrap();
        assert_eq!(s.nodes[0], 0.0);
        assert!((s.nodes[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            build_nodeset(NodeFamily::augmented_gauss(), 1),
            Err(Error::TooFewPoints { .. })
        ));
        assert!(build_nodeset(NodeFamily::standard_gauss(), 0).is_err());
        assert!(build_nodeset(NodeFamily::standard_gauss(), 1).is_ok());
    }

    #[test]
    fn radau_alpha_is_fixed() {
        assert!(NodeFamily::gauss_radau().with_alpha(0.0).is_err());
        assert_eq!(NodeFamily::standard_gauss().with_alpha(2.0).unwrap().alpha(), 2.0);
    }

    #[test]
    fn two_point_augmented_coeffs() {
        let (_, c) = collocate(NodeFamily::augmented_gauss(), 2).unwrap();
        assert_eq!(c.values[0], 1.0);
        assert!((c.values[1] + (-0.5f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn interpolant_reproduces_weighted_polynomials() {
        let (s, c) = collocate(NodeFamily::augmented_gauss(), 12).unwrap();
        let f = |x: f64| (-0.5 * x).exp() * (1.0 - 3.0 * x + x.powi(5));
        let v: Vec<f64> = s.nodes.iter().map(|&x| f(x)).collect();
        for x in [0.0, 0.3, 2.5, 7.0, 19.0] {
            let got = weighted_interpolant(&s, &c, &v, x).unwrap();
            assert!(
                (got - f(x)).abs() <= 1e-12 * f(x).abs().max(1e-3),
                "{x}: {got} vs {}",
                f(x)
            );
        }
        assert_eq!(weighted_interpolant(&s, &c, &v, s.nodes[3]).unwrap(), v[3]);
        assert!(weighted_interpolant(&s, &c, &v[1..], 1.0).is_err());
    }

    #[test]
    fn radau_origin_coefficient() {
        let (_, c) = collocate(NodeFamily::gauss_radau(), 31).unwrap();
        assert!((c.values[0] - 31.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_count_must_match() {
        let s = build_nodeset(NodeFamily::augmented_gauss(), 4).unwrap();
        assert!(matches!(scaled_coeffs(&s, &[1.0]), Err(Error::Dimension(_))));
        assert!(matches!(
            scaled_coeffs(&s, &[1.0, 0.0, 1.0]),
            Err(Error::ZeroDerivative { index: 1 })
        ));
    }
}
