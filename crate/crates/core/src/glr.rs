//! Root sweep for Laguerre functions.
//!
//! The Laguerre function `y = L̂_n^(α)` solves
//! `x y'' + (α + 1) y' + (n + (α + 1)/2 - x/4) y = 0`.
//! Starting near the origin, each root is predicted from the previous one by
//! integrating the Prüfer phase equation over a phase advance of π, then
//! corrected by Newton's method on a Taylor expansion of `y` about the
//! previous root. The Taylor coefficients come from the differentiated ODE,
//! so the weight `e^{-x/2}` never appears past the first few roots and the
//! derivative at each root falls out of the same expansion.

use crate::dw::Dw;
use crate::error::{Error, Result};
use crate::eval::{eval_function_modified, eval_value_compensated, EvalPair, LaguerreParam};

/// Default Taylor order.
pub const TAYLOR_ORDER: usize = 30;
/// Default number of roots found with recurrence-based Newton.
pub const RECURRENCE_ROOTS: usize = 20;
const MAX_NEWTON: usize = 50;
const PRUFER_STEPS: usize = 10;
/// Largest accepted ratio of the last Taylor term to the largest.
const TAIL_TOL: f64 = 0.25 * f64::EPSILON;

/// A quadratic `c2 x² + c1 x + c0`, stored as `[c2, c1, c0]`.
pub type Quadratic = [f64; 3];

fn quad(c: &Quadratic, x: f64) -> f64 {
    (c[0] * x + c[1]) * x + c[2]
}

fn quad_d(c: &Quadratic, x: f64) -> f64 {
    2.0 * c[0] * x + c[1]
}

fn quad_dw(c: &Quadratic, x: f64) -> Dw {
    Dw::from(c[0]).mul_f(x).add(Dw::from(c[1])).mul_f(x).add(Dw::from(c[2]))
}

fn quad_d_dw(c: &Quadratic, x: f64) -> Dw {
    Dw::from(2.0 * c[0]).mul_f(x).add(Dw::from(c[1]))
}

/// Coefficients of `p(x) y'' + q(x) y' + r(x) y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeCoefficients {
    pub p: Quadratic,
    pub q: Quadratic,
    pub r: Quadratic,
    /// Rounding error of `r[2]`, kept for the double-word expansion.
    r_lo: f64,
}

impl OdeCoefficients {
    pub fn new(p: Quadratic, q: Quadratic, r: Quadratic) -> Self {
        Self { p, q, r, r_lo: 0.0 }
    }

    /// Upper bound on the largest root, when the ODE came from
    /// [`ode_coefficients`].
    fn largest_root_bound(&self) -> f64 {
        // r = n + (α + 1)/2 - x/4, q = α + 1
        let alpha = self.q[2] - 1.0;
        let n = self.r[2] - 0.5 * (alpha + 1.0);
        largest_root_bound(n.round() as usize, alpha)
    }
}

/// ODE satisfied by `L̂_n^(α)`.
pub fn ode_coefficients(param: LaguerreParam) -> OdeCoefficients {
    let a = param.alpha();
    let n = param.degree() as f64;
    let r0 = Dw::sum(n, 0.5 * (a + 1.0));
    OdeCoefficients {
        p: [0.0, 1.0, 0.0],
        q: [0.0, 0.0, a + 1.0],
        r: [0.0, -0.25, r0.hi],
        r_lo: r0.lo,
    }
}

/// `2n + α + 1 + sqrt((2n + α + 1)² + 1/4 - α²)`.
pub fn largest_root_bound(n: usize, alpha: f64) -> f64 {
    let s = 2.0 * n as f64 + alpha + 1.0;
    s + (s * s + 0.25 - alpha * alpha).max(0.0).sqrt()
}

/// Scaled derivatives `y^(k)(center) / k!` for `k = 0..=order`.
///
/// The coefficients are carried in double-word precision; `coeffs` holds
/// their leading parts.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    pub center: f64,
    pub coeffs: Vec<f64>,
    pub ode: OdeCoefficients,
    lo: Vec<f64>,
}

impl TaylorJet {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Distance from the center to the nearest zero of `p`.
    pub fn radius(&self) -> f64 {
        let [a, b, c] = self.ode.p;
        let x = self.center;
        if a == 0.0 {
            if b == 0.0 {
                f64::INFINITY
            } else {
                (x + c / b).abs()
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                let r1 = (-b - s) / (2.0 * a);
                let r2 = (-b + s) / (2.0 * a);
                (x - r1).abs().min((x - r2).abs())
            } else {
                let re = -b / (2.0 * a);
                let im = (-disc).sqrt() / (2.0 * a.abs());
                (x - re).hypot(im)
            }
        }
    }

    /// `(y(center + h), y'(center + h))`.
    pub fn eval(&self, h: f64) -> (f64, f64) {
        let (v, d) = self.eval_dw(h);
        (v.value(), d.value())
    }

    fn eval_dw(&self, h: f64) -> (Dw, Dw) {
        let mut v = Dw::default();
        let mut d = Dw::default();
        for (k, (&hi, &lo)) in self.coeffs.iter().zip(&self.lo).enumerate().rev() {
            let c = Dw { hi, lo };
            v = v.mul_f(h).add(c);
            if k > 0 {
                d = d.mul_f(h).add(c.mul_f(k as f64));
            }
        }
        (v, d)
    }

    /// Size of the last retained term relative to the largest term at `h`.
    pub fn tail_ratio(&self, h: f64) -> f64 {
        let mut big = 0.0f64;
        let mut hk = 1.0;
        let mut last = 0.0;
        for &c in &self.coeffs {
            last = (c * hk).abs();
            big = big.max(last);
            hk *= h;
        }
        if big == 0.0 {
            0.0
        } else {
            last / big
        }
    }

    /// Whether the truncated series is trustworthy at offset `h`.
    pub fn reaches(&self, h: f64) -> bool {
        h.abs() <= 0.5 * self.radius() && self.tail_ratio(h) <= TAIL_TOL
    }

    /// Re-expands about `center + h`, stepping so that every intermediate
    /// expansion is used within [`TaylorJet::reaches`].
    pub fn continue_to(&self, h: f64) -> Result<TaylorJet> {
        let target = self.center + h;
        let mut jet = self.clone();
        while !jet.reaches(target - jet.center) {
            let mut step = (target - jet.center).clamp(-0.25 * jet.radius(), 0.25 * jet.radius());
            while !jet.reaches(step) {
                step *= 0.5;
            }
            let next = jet.center + step;
            let (v, d) = jet.eval_dw(next - jet.center);
            jet = jet_dw(next, v, d, self.order(), &self.ode)?;
        }
        Ok(jet)
    }
}

/// Expands the solution with value and slope `seed` about `center`.
///
/// Differentiating the ODE `k` times gives
/// `p y^(k+2) + (k p' + q) y^(k+1) + (C(k,2) p'' + k q' + r) y^(k)
///  + (C(k,2) q'' + k r') y^(k-1) + C(k,2) r'' y^(k-2) = 0`.
pub fn taylor_jet(center: f64, seed: EvalPair, m: usize, ode: &OdeCoefficients) -> Result<TaylorJet> {
    jet_dw(center, Dw::from(seed.value), Dw::from(seed.derivative), m, ode)
}

fn jet_dw(center: f64, value: Dw, slope: Dw, m: usize, ode: &OdeCoefficients) -> Result<TaylorJet> {
    if m < 2 {
        return Err(Error::InvalidParam(format!("Taylor order must be >= 2, got {m}")));
    }
    let p = quad_dw(&ode.p, center);
    if p.value() == 0.0 {
        return Err(Error::SingularCenter);
    }
    let (dp, ddp) = (quad_d_dw(&ode.p, center), 2.0 * ode.p[0]);
    let (q, dq, ddq) = (quad_dw(&ode.q, center), quad_d_dw(&ode.q, center), 2.0 * ode.q[0]);
    let r = quad_dw(&ode.r, center).add(Dw::from(ode.r_lo));
    let (dr, ddr) = (quad_d_dw(&ode.r, center), 2.0 * ode.r[0]);

    let mut a = vec![Dw::default(); m + 1];
    a[0] = value;
    a[1] = slope;
    for k in 0..=m - 2 {
        let kf = k as f64;
        let c2 = 0.5 * kf * (kf - 1.0);
        let t1 = dp.mul_f(kf).add(q).mul_f(kf + 1.0);
        let t2 = Dw::from(c2 * ddp).add(dq.mul_f(kf)).add(r);
        let mut s = t1.mul(a[k + 1]).add(t2.mul(a[k]));
        if k >= 1 {
            s = s.add(Dw::from(0.5 * (kf - 1.0) * ddq).add(dr).mul(a[k - 1]));
        }
        if k >= 2 {
            s = s.add(a[k - 2].mul_f(0.5 * ddr));
        }
        a[k + 2] = s.neg().div(p.mul_f((kf + 2.0) * (kf + 1.0)));
        if !a[k + 2].value().is_finite() {
            return Err(Error::NonFinite {
                stage: "taylor jet",
                index: k + 2,
            });
        }
    }
    Ok(TaylorJet {
        center,
        coeffs: a.iter().map(|c| c.hi).collect(),
        ode: *ode,
        lo: a.iter().map(|c| c.lo).collect(),
    })
}

/// Phase-equation right-hand side `dx/dθ` for `tan θ = sqrt(r/p) y / y'`.
fn dx_dtheta(ode: &OdeCoefficients, x: f64, theta: f64) -> f64 {
    let p = quad(&ode.p, x);
    let r = quad(&ode.r, x);
    let dp = quad_d(&ode.p, x);
    let dr = quad_d(&ode.r, x);
    let q = quad(&ode.q, x);
    let s = (r / p).sqrt();
    let c = (dr * p - r * dp + 2.0 * q * r) / (2.0 * r * p);
    1.0 / (s + c * theta.sin() * theta.cos())
}

/// Integrates `x(θ)` from `(theta0, x0)` to `theta1` with fixed RK4 steps.
fn integrate_phase(ode: &OdeCoefficients, x0: f64, theta0: f64, theta1: f64) -> Option<f64> {
    let h = (theta1 - theta0) / PRUFER_STEPS as f64;
    let mut x = x0;
    let mut t = theta0;
    for _ in 0..PRUFER_STEPS {
        let k1 = h * dx_dtheta(ode, x, t);
        let k2 = h * dx_dtheta(ode, x + 0.5 * k1, t + 0.5 * h);
        let k3 = h * dx_dtheta(ode, x + 0.5 * k2, t + 0.5 * h);
        let k4 = h * dx_dtheta(ode, x + k3, t + h);
        x += (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        t += h;
        if !x.is_finite() || x <= 0.0 {
            return None;
        }
    }
    Some(x)
}

/// Predicts the root following `prev_root`.
pub fn prufer_predict(prev_root: f64, ode: &OdeCoefficients) -> Result<f64> {
    let bound = ode.largest_root_bound();
    match integrate_phase(ode, prev_root, 0.0, std::f64::consts::PI) {
        Some(x) if x < bound => Ok(x),
        _ => Err(Error::NoFurtherRoots { bound }),
    }
}

/// Newton on the Taylor sums of `jet`, starting at offset `guess_offset`.
/// Offsets beyond half the radius are first reached by continuation.
///
/// Returns `(root, y'(root), y(root))`.
pub fn newton_refine(jet: &TaylorJet, guess_offset: f64) -> Result<(f64, f64, f64)> {
    newton_refine_indexed(jet, guess_offset, 0)
}

fn newton_refine_indexed(jet: &TaylorJet, guess_offset: f64, index: usize) -> Result<(f64, f64, f64)> {
    refine(jet, guess_offset, index).map(|(x, d, v, _)| (x, d, v))
}

/// As [`newton_refine`], also returning the tail ratio of the expansion
/// that produced the root. Re-expands if Newton leaves the trusted range.
fn refine(jet: &TaylorJet, guess_offset: f64, index: usize) -> Result<(f64, f64, f64, f64)> {
    let target = jet.center + guess_offset;
    let mut near = if jet.reaches(guess_offset) {
        jet.clone()
    } else {
        jet.continue_to(guess_offset)?
    };
    let mut start = target - near.center;
    for _ in 0..4 {
        let (x, d, v) = newton_local(&near, start, index)?;
        let h = x - near.center;
        if near.reaches(h) {
            return Ok((x, d, v, near.tail_ratio(h)));
        }
        near = near.continue_to(h)?;
        start = x - near.center;
    }
    Err(Error::NoConvergence {
        index,
        iterations: 0,
        trace: vec![],
    })
}

fn newton_local(jet: &TaylorJet, guess_offset: f64, index: usize) -> Result<(f64, f64, f64)> {
    let mut h = guess_offset;
    let mut stop = NewtonStop::default();
    for _ in 0..MAX_NEWTON {
        let (v, d) = jet.eval(h);
        let step = v / d;
        match stop.observe(jet.center + h, v, step) {
            Some(x) => return Ok(jet_at(jet, x)),
            None => h -= step,
        }
        if !h.is_finite() {
            break;
        }
    }
    Err(stop.failure(index))
}

/// `(x, y'(x), y(x))` at the representable abscissa nearest the root,
/// stepping while the residual shrinks.
fn jet_at(jet: &TaylorJet, mut x: f64) -> (f64, f64, f64) {
    let (mut v, mut d) = jet.eval(x - jet.center);
    for _ in 0..4 {
        let y = x - v / d;
        if y == x {
            break;
        }
        let (vy, dy) = jet.eval(y - jet.center);
        if vy.abs() >= v.abs() {
            break;
        }
        (x, v, d) = (y, vy, dy);
    }
    (x, d, v)
}

/// Newton termination: a step below `10 eps |x|`, or steps that stall at
/// rounding level, in which case the iterate with the smallest residual
/// wins.
#[derive(Default)]
struct NewtonStop {
    trace: Vec<f64>,
    prev_step: Option<f64>,
    best: Option<(f64, f64)>,
}

impl NewtonStop {
    fn observe(&mut self, x: f64, value: f64, step: f64) -> Option<f64> {
        self.trace.push(x - step);
        if self.best.is_none_or(|(_, v)| value.abs() < v) {
            self.best = Some((x, value.abs()));
        }
        let tiny = step.abs() <= 10.0 * f64::EPSILON * (x - step).abs();
        let stalled =
            step.abs() <= 1e3 * f64::EPSILON * x.abs() && self.prev_step.is_some_and(|p| step.abs() > 0.5 * p.abs());
        self.prev_step = Some(step);
        if tiny {
            Some(x - step)
        } else if stalled {
            self.best.map(|b| b.0)
        } else {
            None
        }
    }

    fn failure(self, index: usize) -> Error {
        Error::NoConvergence {
            index,
            iterations: self.trace.len(),
            trace: self.trace,
        }
    }
}

/// Roots of `L_n^(α)` with `L̂_n'` at each.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSweepResult {
    pub roots: Vec<f64>,
    pub derivs: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Largest [`TaylorJet::tail_ratio`] over the accepted Taylor steps.
    pub max_tail: f64,
}

/// Tuning knobs for [`sweep_roots_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    pub recurrence_roots: usize,
    pub taylor_order: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            recurrence_roots: RECURRENCE_ROOTS,
            taylor_order: TAYLOR_ORDER,
        }
    }
}

pub fn sweep_roots(param: LaguerreParam) -> Result<RootSweepResult> {
    sweep_roots_with(param, SweepConfig::default())
}

pub fn sweep_roots_with(param: LaguerreParam, cfg: SweepConfig) -> Result<RootSweepResult> {
    let n = param.degree();
    if n == 0 {
        return Err(Error::InvalidParam("root sweep needs degree >= 1".into()));
    }
    let ode = ode_coefficients(param);
    let bound = largest_root_bound(n, param.alpha());
    let k = cfg.recurrence_roots.clamp(1, n);

    let mut roots = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut max_tail = 0.0f64;

    let mut guess = first_root_guess(param)?;
    for i in 0..k {
        if i > 0 {
            let prev = roots[i - 1];
            guess = prufer_predict(prev, &ode).unwrap_or(prev + gap_estimate(&roots));
        }
        let mut found = recurrence_newton(param, guess, i);
        if !accept(&found, &roots, &derivs) {
            found = recurrence_bisect(param, &roots, i);
        }
        let (x, d, v) = found?;
        roots.push(x);
        derivs.push(d);
        residuals.push(v);
    }

    for i in k..n {
        let c = roots[i - 1];
        let seed = EvalPair {
            value: residuals[i - 1],
            derivative: derivs[i - 1],
        };
        let jet = taylor_jet(c, seed, cfg.taylor_order, &ode)?;
        let guess = prufer_predict(c, &ode).unwrap_or(c + gap_estimate(&roots));
        let mut found = refine(&jet, guess - c, i);
        if !accept(&found, &roots, &derivs) {
            found = jet_bisect(&jet, gap_estimate(&roots), i);
        }
        let (x, d, v, tail) = found?;
        if !x.is_finite() || !d.is_finite() {
            return Err(Error::NonFinite {
                stage: "root sweep",
                index: i,
            });
        }
        max_tail = max_tail.max(tail);
        roots.push(x);
        derivs.push(d);
        residuals.push(v);
    }

    if let Some(&last) = roots.last() {
        if last >= bound {
            return Err(Error::NoFurtherRoots { bound });
        }
    }
    Ok(RootSweepResult {
        roots,
        derivs,
        residuals,
        max_tail,
    })
}

fn gap_estimate(roots: &[f64]) -> f64 {
    match roots {
        [.., a, b] => b - a,
        [a] => *a,
        [] => 1.0,
    }
}

/// A candidate is accepted when it lies above the previous root and its
/// derivative has the opposite sign.
fn accept<T: Candidate>(found: &Result<T>, roots: &[f64], derivs: &[f64]) -> bool {
    let Ok(found) = found else {
        return false;
    };
    let (x, d) = found.root_and_slope();
    match (roots.last(), derivs.last()) {
        (Some(&prev), Some(&pd)) => x > prev && d.signum() != pd.signum() && d != 0.0,
        (None, _) => x > 0.0 && d < 0.0,
        _ => false,
    }
}

/// A point below the first root. Newton started there climbs to the first
/// root monotonically.
fn first_root_guess(param: LaguerreParam) -> Result<f64> {
    let (n, a) = (param.degree(), param.alpha());
    let mut xs = 1.0 / (2.0 * n as f64 + a + 1.0);
    // below the first root every L_k(xs), k <= n, is positive
    while !all_positive(n, a, xs) {
        xs *= 0.5;
        if xs < f64::MIN_POSITIVE {
            return Err(Error::NonFinite {
                stage: "first-root bracket",
                index: 0,
            });
        }
    }
    Ok(xs)
}

fn all_positive(n: usize, alpha: f64, x: f64) -> bool {
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    if cur <= 0.0 {
        return false;
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        if next <= 0.0 {
            return false;
        }
        prev = cur;
        cur = next;
    }
    true
}

fn recurrence_newton(param: LaguerreParam, guess: f64, index: usize) -> Result<(f64, f64, f64)> {
    let mut x = guess;
    let mut stop = NewtonStop::default();
    for _ in 0..MAX_NEWTON {
        let e = eval_function_modified(param, x)?;
        let step = e.value / e.derivative;
        if let Some(root) = stop.observe(x, e.value, step) {
            return polish(param, root);
        }
        x -= step;
        if !x.is_finite() || x <= 0.0 {
            break;
        }
    }
    Err(stop.failure(index))
}

/// Newton steps on the compensated value until the residual stops
/// shrinking. Returns `(root, L̂'(root), L̂(root))`.
fn polish(param: LaguerreParam, mut x: f64) -> Result<(f64, f64, f64)> {
    let mut v = eval_value_compensated(param, x)?;
    for _ in 0..4 {
        let d = eval_function_modified(param, x)?.derivative;
        let y = x - v / d;
        if y == x || y <= 0.0 {
            break;
        }
        let vy = eval_value_compensated(param, y)?;
        if vy.abs() >= v.abs() {
            break;
        }
        x = y;
        v = vy;
    }
    Ok((x, eval_function_modified(param, x)?.derivative, v))
}

/// Fallback: bracket root `index` between the previous root and a doubling
/// step, bisect, then polish with Newton.
fn recurrence_bisect(param: LaguerreParam, roots: &[f64], index: usize) -> Result<(f64, f64, f64)> {
    let lo0 = roots.last().copied().unwrap_or(0.0);
    let f = |x: f64| eval_function_modified(param, x).map(|e| e.value);
    let step0 = gap_estimate(roots) / 8.0;
    let (lo, hi) = bracket(f, lo0, step0, index)?;
    let mid = bisect(f, lo, hi)?;
    recurrence_newton(param, mid, index)
}

fn jet_bisect(jet: &TaylorJet, gap: f64, index: usize) -> Result<(f64, f64, f64, f64)> {
    let f = |h: f64| Ok(jet.eval(h).0);
    let (lo, hi) = bracket(f, 0.0, gap / 8.0, index)?;
    let mid = bisect(f, lo, hi)?;
    refine(jet, mid, index)
}

trait Candidate {
    fn root_and_slope(&self) -> (f64, f64);
}

impl Candidate for (f64, f64, f64) {
    fn root_and_slope(&self) -> (f64, f64) {
        (self.0, self.1)
    }
}

impl Candidate for (f64, f64, f64, f64) {
    fn root_and_slope(&self) -> (f64, f64) {
        (self.0, self.1)
    }
}

/// Scans upward from just above `start` until `f` changes sign, doubling
/// the step each time the scan range is exhausted.
fn bracket(f: impl Fn(f64) -> Result<f64>, start: f64, step0: f64, index: usize) -> Result<(f64, f64)> {
    let mut step = step0;
    for _ in 0..8 {
        let mut lo = start + 1e-3 * step;
        let mut flo = f(lo)?;
        for _ in 0..16 {
            let hi = lo + step;
            let fhi = f(hi)?;
            if flo.signum() != fhi.signum() {
                return Ok((lo, hi));
            }
            lo = hi;
            flo = fhi;
        }
        step *= 2.0;
    }
    Err(Error::NoConvergence {
        index,
        iterations: 0,
        trace: vec![],
    })
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let flo = f(lo)?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
