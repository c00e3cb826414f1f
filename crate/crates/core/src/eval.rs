//! Generalized Laguerre polynomials and Laguerre functions.
//!
//! The Laguerre function is `L̂_n(x) = e^{-x/2} L_n(x)`. Two recurrences are
//! provided for it: the classical three-term form and a difference form that
//! carries `δL_k = L_k - L_{k-1}` alongside `L_k`. The difference form avoids
//! the `2k + α + 1 - x` coefficient, which cancels for small `x`.

use crate::dw::Dw;
use crate::error::{Error, Result};

/// Largest `x` accepted by the weighted evaluators. Beyond it `e^{-x/2}` is
/// too close to the underflow threshold.
pub const WEIGHT_LIMIT: f64 = 2.0 * 0.95 * 709.782_712_893_384;

/// The pair `(α, n)` selecting `L_n^(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParam {
    alpha: f64,
    degree: usize,
}

impl LaguerreParam {
    pub fn new(alpha: f64, degree: usize) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::InvalidParam(format!(
                "alpha must be finite and > -1, got {alpha}"
            )));
        }
        Ok(Self { alpha, degree })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Same α, different degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        Self { degree, ..*self }
    }
}

/// Value and first derivative at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPair {
    pub value: f64,
    pub derivative: f64,
}

/// `L_n^(α)(x)` by forward recurrence.
pub fn eval_poly(param: LaguerreParam, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParam(format!("x must be finite, got {x}")));
    }
    let (n, a) = (param.degree, param.alpha);
    if n == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - x) * cur - (kf + a) * prev) / (kf + 1.0);
        if !next.is_finite() {
            return Err(Error::Overflow { degree: k + 1, x });
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `binom(n + α, n)`, the value `L_n^(α)(0)`.
pub fn binom_at_zero(n: usize, alpha: f64) -> f64 {
    (1..=n).fold(1.0, |b, i| b * (alpha + i as f64) / i as f64)
}

/// `-binom(n + α, n - 1)`, the derivative `L_n^(α)'(0)`.
fn poly_derivative_at_zero(n: usize, alpha: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    -(1..n).fold(1.0, |b, i| b * (alpha + 1.0 + i as f64) / i as f64)
}

fn check_weighted_domain(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidParam(format!("x must be finite and >= 0, got {x}")));
    }
    if x > WEIGHT_LIMIT {
        return Err(Error::UseTaylorPath { x });
    }
    Ok(())
}

fn finish(param: LaguerreParam, x: f64, value: f64, x_deriv_poly: f64) -> Result<EvalPair> {
    let n = param.degree;
    let derivative = if x == 0.0 {
        poly_derivative_at_zero(n, param.alpha) - 0.5 * binom_at_zero(n, param.alpha)
    } else {
        x_deriv_poly / x - 0.5 * value
    };
    if !value.is_finite() || !derivative.is_finite() {
        return Err(Error::Overflow { degree: n, x });
    }
    Ok(EvalPair { value, derivative })
}

/// `(L̂_n(x), L̂_n'(x))` from the three-term recurrence seeded with `e^{-x/2}`.
pub fn eval_function(param: LaguerreParam, x: f64) -> Result<EvalPair> {
    check_weighted_domain(x)?;
    let (n, a) = (param.degree, param.alpha);
    let w = (-0.5 * x).exp();
    if n == 0 {
        return finish(param, x, w, 0.0);
    }
    let mut prev = w;
    let mut cur = (1.0 + a - x) * w;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    // x L_n' = n L_n - (n + α) L_{n-1}
    let nf = n as f64;
    finish(param, x, cur, nf * cur - (nf + a) * prev)
}

/// `(L̂_n(x), L̂_n'(x))` from the difference recurrence
/// `δL_{k+1} = ((k + α) δL_k - x L_k) / (k + 1)`.
pub fn eval_function_modified(param: LaguerreParam, x: f64) -> Result<EvalPair> {
    check_weighted_domain(x)?;
    let (n, a) = (param.degree, param.alpha);
    let w = (-0.5 * x).exp();
    if n == 0 {
        return finish(param, x, w, 0.0);
    }
    let (l, dl) = modified_recurrence(n, a, x, w);
    // x L_n' = (n + α) δL_n - α L_n
    finish(param, x, l, (n as f64 + a) * dl - a * l)
}

/// `(L_n, δL_n)` times `w`, for `n >= 1`.
pub(crate) fn modified_recurrence(n: usize, alpha: f64, x: f64, w: f64) -> (f64, f64) {
    let mut dl = (alpha - x) * w;
    let mut l = w + dl;
    for k in 1..n {
        let kf = k as f64;
        dl = ((kf + alpha) * dl - x * l) / (kf + 1.0);
        l += dl;
    }
    (l, dl)
}

/// `L̂_n(x)` with the difference recurrence carried in double-word
/// arithmetic. Used to polish roots, where the plain recurrence's rounding
/// error is comparable to the value itself.
pub fn eval_value_compensated(param: LaguerreParam, x: f64) -> Result<f64> {
    check_weighted_domain(x)?;
    let (n, a) = (param.degree, param.alpha);
    let w = (-0.5 * x).exp();
    if n == 0 {
        return Ok(w);
    }
    let mut dl = Dw::sum(a, -x).mul_f(w);
    let mut l = dl.add(Dw::from(w));
    for k in 1..n {
        let ka = Dw::sum(k as f64, a);
        dl = ka.mul(dl).add(l.mul_f(-x)).div_f((k + 1) as f64);
        l = l.add(dl);
    }
    let v = l.hi + l.lo;
    if !v.is_finite() {
        return Err(Error::Overflow { degree: n, x });
    }
    Ok(v)
}
