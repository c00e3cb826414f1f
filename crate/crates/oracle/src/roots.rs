//! Reference roots of L_n^(α) and Laguerre-function derivatives at them.
//!
//! Root isolation uses a binary64 Sturm count on the three-term recurrence
//! (bisection, no derivative information). Each isolated root is then
//! polished by Newton's method in double-word arithmetic on the difference
//! form of the recurrence. Magnitudes are carried as `mantissa * 2^exp` so
//! no intermediate over- or underflows, whatever the degree.

use crate::dw::DoubleWord;

/// A double-word value times a power of two.
#[derive(Debug, Clone, Copy)]
pub struct Scaled {
    pub mant: DoubleWord,
    pub exp: i64,
}

impl Scaled {
    pub fn to_dw(self) -> DoubleWord {
        self.mant
            .ldexp(self.exp.clamp(i32::MIN as i64 / 2, i32::MAX as i64 / 2) as i32)
    }

    pub fn times(self, o: Scaled) -> Scaled {
        Scaled {
            mant: self.mant * o.mant,
            exp: self.exp + o.exp,
        }
    }
}

const RESCALE_BITS: i32 = 600;

/// Polynomial value L_n and difference δL_n = L_n - L_{n-1}, sharing one
/// scale exponent.
fn poly_and_delta(n: usize, alpha: DoubleWord, x: DoubleWord) -> (DoubleWord, DoubleWord, i64) {
    let mut l = DoubleWord::ONE;
    let mut dl = alpha - x;
    let mut e = 0i64;
    if n == 0 {
        return (l, DoubleWord::ZERO, 0);
    }
    l += dl;
    for k in 1..n {
        let kf = DoubleWord::from_f64(k as f64);
        dl = ((kf + alpha) * dl - x * l) / DoubleWord::from_f64((k + 1) as f64);
        l += dl;
        let big = l.hi.abs().max(dl.hi.abs());
        if big > 2f64.powi(RESCALE_BITS) {
            l = l.ldexp(-RESCALE_BITS);
            dl = dl.ldexp(-RESCALE_BITS);
            e += RESCALE_BITS as i64;
        }
    }
    (l, dl, e)
}

/// x * L_n'(x) = (n + α) δL_n - α L_n, returned with the same scale.
fn x_times_deriv(n: usize, alpha: DoubleWord, l: DoubleWord, dl: DoubleWord) -> DoubleWord {
    (DoubleWord::from_f64(n as f64) + alpha) * dl - alpha * l
}

/// Number of roots of L_n^(α) strictly below `x`, from sign changes of the
/// sequence (-1)^k L_k(x), k = 0..n (which counts roots above `x`).
pub fn count_roots_below(n: usize, alpha: f64, x: f64) -> usize {
    let mut prev = 1.0f64;
    let mut cur = 1.0 + alpha - x;
    let mut changes = 0usize;
    let mut last_sign = 1.0f64;
    let sign_of = |k: usize, v: f64| -> f64 {
        let s = if v < 0.0 { -1.0 } else { 1.0 };
        if k % 2 == 1 {
            -s
        } else {
            s
        }
    };
    if n >= 1 {
        let s = sign_of(1, cur);
        if s != last_sign {
            changes += 1;
        }
        last_sign = s;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            cur *= 1e-150;
            prev *= 1e-150;
        }
        let s = sign_of(k + 1, cur);
        if s != last_sign {
            changes += 1;
        }
        last_sign = s;
    }
    n - changes
}

/// Upper bound on the largest root.
pub fn largest_root_bound(n: usize, alpha: f64) -> f64 {
    let s = 2.0 * n as f64 + alpha + 1.0;
    s + (s * s + 0.25 - alpha * alpha).max(0.0).sqrt()
}

#[derive(Debug, Clone)]
pub struct OracleRoots {
    pub n: usize,
    pub alpha: f64,
    pub roots: Vec<DoubleWord>,
    /// Laguerre-function derivative e^{-x/2} L_n'(x) at each root.
    pub derivs: Vec<DoubleWord>,
}

impl OracleRoots {
    pub fn roots_f64(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.to_f64()).collect()
    }

    pub fn derivs_f64(&self) -> Vec<f64> {
        self.derivs.iter().map(|r| r.to_f64()).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("oracle Newton did not converge for root {index} of L_{n}")]
    NoConvergence { n: usize, index: usize },
    #[error("oracle needs n >= 1, got {0}")]
    BadDegree(usize),
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    Format(String),
}

/// Isolates root `i` (0-based) of L_n^(α) in (lo, hi) by bisection on the
/// Sturm count.
fn isolate(n: usize, alpha: f64, i: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_roots_below(n, alpha, mid) > i {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// e^{-x/2} * L_n'(x) at `x`, as a double-word.
pub fn function_derivative(n: usize, alpha: f64, x: DoubleWord) -> DoubleWord {
    let a = DoubleWord::from_f64(alpha);
    let (l, dl, e) = poly_and_delta(n, a, x);
    let xd = x_times_deriv(n, a, l, dl) / x;
    let (em, ee) = (-x.ldexp(-1)).exp_split();
    Scaled { mant: xd, exp: e }.times(Scaled { mant: em, exp: ee }).to_dw()
}

/// e^{-x/2} * L_n(x) at `x`, as a double-word.
pub fn function_value(n: usize, alpha: f64, x: DoubleWord) -> DoubleWord {
    let a = DoubleWord::from_f64(alpha);
    let (l, _, e) = poly_and_delta(n, a, x);
    let (em, ee) = (-x.ldexp(-1)).exp_split();
    Scaled { mant: l, exp: e }.times(Scaled { mant: em, exp: ee }).to_dw()
}

/// All roots of L_n^(α) and the Laguerre-function derivative at each.
pub fn oracle_roots(n: usize, alpha: f64) -> Result<OracleRoots, OracleError> {
    if n == 0 {
        return Err(OracleError::BadDegree(n));
    }
    let a = DoubleWord::from_f64(alpha);
    let upper = largest_root_bound(n, alpha) * (1.0 + 1e-12);
    let mut roots = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    let mut lo = 0.0f64;
    for i in 0..n {
        let guess = isolate(n, alpha, i, lo, upper);
        let mut x = DoubleWord::from_f64(guess);
        let mut converged = false;
        let mut prev_step = f64::INFINITY;
        for _ in 0..30 {
            let (l, dl, _) = poly_and_delta(n, a, x);
            let xd = x_times_deriv(n, a, l, dl);
            let step = x * l / xd;
            x -= step;
            let s = step.hi.abs();
            // stalled at rounding level also counts
            if s <= 1e-30 * x.hi.abs() || (s <= 1e-27 * x.hi.abs() && s > 0.5 * prev_step) {
                converged = true;
                break;
            }
            prev_step = s;
        }
        if !converged || !x.is_finite() {
            return Err(OracleError::NoConvergence { n, index: i });
        }
        lo = x.to_f64();
        roots.push(x);
        derivs.push(function_derivative(n, alpha, x));
    }
    Ok(OracleRoots {
        n,
        alpha,
        roots,
        derivs,
    })
}

/// binom(n + α, n) = prod_{i=1..n} (α + i) / i.
pub fn binom_at_zero(n: usize, alpha: f64) -> DoubleWord {
    let a = DoubleWord::from_f64(alpha);
    let mut b = DoubleWord::ONE;
    for i in 1..=n {
        let fi = DoubleWord::from_f64(i as f64);
        b = b * (a + fi) / fi;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_to_28_digits() {
        let r = oracle_roots(2, 0.0).unwrap();
        let s2 = DoubleWord::from_f64(2.0).sqrt();
        let two = DoubleWord::from_f64(2.0);
        for (got, want) in r.roots.iter().zip([two - s2, two + s2]) {
            assert!(((*got - want) / want).to_f64().abs() < 1e-28);
        }
    }

    #[test]
    fn degree_one_root_is_exactly_one() {
        let r = oracle_roots(1, 0.0).unwrap();
        assert_eq!(r.roots[0].hi, 1.0);
        assert!(r.roots[0].lo.abs() < 1e-30);
        // L^_1'(1) = -e^{-1/2}
        let want = -(-0.5f64).exp();
        assert!((r.derivs[0].to_f64() - want).abs() < 1e-16);
    }

    #[test]
    fn sturm_count_brackets_quadratic() {
        let s = 2f64.sqrt();
        assert_eq!(count_roots_below(2, 0.0, 2.0 - s - 1e-9), 0);
        assert_eq!(count_roots_below(2, 0.0, 2.0), 1);
        assert_eq!(count_roots_below(2, 0.0, 2.0 + s + 1e-9), 2);
    }

    #[test]
    fn large_degree_has_no_overflow() {
        let r = oracle_roots(700, 1.0).unwrap();
        assert_eq!(r.roots.len(), 700);
        assert!(r.derivs.iter().all(|d| d.is_finite() && d.hi != 0.0));
        assert!(r.roots.windows(2).all(|w| w[0] < w[1]));
        assert!(r.roots[699].to_f64() < largest_root_bound(700, 1.0));
    }

    #[test]
    fn sum_of_reciprocal_roots() {
        // sum 1/x_i = n / (α + 1)
        for &(n, alpha) in &[(30usize, 0.0), (40, 1.0), (25, 0.5)] {
            let r = oracle_roots(n, alpha).unwrap();
            let s = r.roots.iter().fold(DoubleWord::ZERO, |acc, x| acc + x.recip());
            let want = DoubleWord::from_f64(n as f64) / DoubleWord::from_f64(alpha + 1.0);
            let rel = ((s - want) / want).to_f64().abs();
            assert!(rel < 1e-27, "n={n} alpha={alpha} rel={rel:e}");
        }
    }
}
