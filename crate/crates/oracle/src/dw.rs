//! Double-word ("double-double") arithmetic.
//!
//! A [`DoubleWord`] stores a value as the unevaluated sum `hi + lo` of two
//! binary64 numbers with `|lo| <= ulp(hi)/2`, giving roughly 106 bits
//! (about 31 decimal digits) of significand. All operations are built on
//! the error-free transformations TwoSum and FMA-based TwoProd.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleWord {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// ln 2 to double-word precision.
pub const LN2: DoubleWord = DoubleWord {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl DoubleWord {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Builds a normalized value from an arbitrary pair.
    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    /// Multiplication by an exact power of two.
    #[inline]
    pub fn ldexp(self, e: i32) -> Self {
        let mut out = self;
        let mut e = e;
        while e != 0 {
            let step = e.clamp(-1000, 1000);
            let s = 2f64.powi(step);
            out = Self {
                hi: out.hi * s,
                lo: out.lo * s,
            };
            e -= step;
        }
        out
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = self.lo.mul_add(b, e);
        let (hi, lo) = fast_two_sum(p, e);
        Self { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = fast_two_sum(s, e + self.lo);
        Self { hi, lo }
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        // One Newton step on the binary64 estimate doubles the precision.
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = fast_two_sum(x, r);
        Self { hi, lo }
    }

    /// Nearest integer, returned as f64.
    pub fn round(self) -> f64 {
        let h = self.hi.round();
        if h == self.hi {
            // hi is integral; lo decides the rounding.
            h + self.lo.round()
        } else if (h - self.hi).abs() == 0.5 {
            if self.lo > 0.0 && h < self.hi {
                h + 1.0
            } else if self.lo < 0.0 && h > self.hi {
                h - 1.0
            } else {
                h
            }
        } else {
            h
        }
    }

    /// e^x split as mantissa * 2^exponent, valid far outside the binary64
    /// exponent range.
    pub fn exp_split(self) -> (Self, i64) {
        let k = (self / LN2).round();
        let r = self - LN2.mul_f64(k);
        // |r| <= ln2/2; shrink further by 2^-5 and square back up.
        let t = r.ldexp(-5);
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        for i in 1..=20 {
            term = (term * t) / Self::from_f64(i as f64);
            sum += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..5 {
            sum = sum.sqr();
        }
        (sum, k as i64)
    }

    /// e^x for arguments whose result is representable.
    pub fn exp(self) -> Self {
        let (m, k) = self.exp_split();
        m.ldexp(k as i32)
    }

    /// Formats with exactly `digits` significant decimal digits in
    /// scientific notation.
    pub fn to_sci_string(self, digits: usize) -> String {
        if self.hi == 0.0 {
            return format!("{:.*e}", digits.saturating_sub(1), 0.0);
        }
        if !self.is_finite() {
            return format!("{}", self.hi);
        }
        let neg = self.is_sign_negative();
        let mut x = self.abs();
        let mut e10 = x.hi.log10().floor() as i32;
        x *= pow10(-e10);
        while x.hi >= 10.0 {
            x = x / Self::from_f64(10.0);
            e10 += 1;
        }
        while x.hi < 1.0 {
            x = x.mul_f64(10.0);
            e10 -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - Self::from_f64(d)).mul_f64(10.0);
            if x.is_sign_negative() {
                x = Self::ZERO;
            }
        }
        // round half up on the guard digit
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e10 += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        ds.truncate(digits);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if digits > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push_str(&format!("e{e10}"));
        s
    }
}

/// 10^e in double-word precision.
pub fn pow10(e: i32) -> DoubleWord {
    let ten = DoubleWord::from_f64(10.0);
    let mut r = DoubleWord::ONE;
    let mut b = ten;
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            r *= b;
        }
        b = b * b;
        k >>= 1;
    }
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

impl From<f64> for DoubleWord {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Neg for DoubleWord {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleWord {
    type Output = Self;
    // Accurate sum: both halves are added with TwoSum.
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = fast_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = fast_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Sub for DoubleWord {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleWord {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let t = self.hi.mul_add(b.lo, self.lo * b.hi);
        let e = e + t;
        let (hi, lo) = fast_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleWord {
    type Output = Self;
    // Long division with three binary64 quotient digits.
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = fast_two_sum(q1, q2);
        Self { hi: q1, lo: q2 }.add_f64(q3)
    }
}

impl AddAssign for DoubleWord {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleWord {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleWord {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

impl PartialOrd for DoubleWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for DoubleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(32);
        f.write_str(&self.to_sci_string(digits))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDoubleWordError(pub String);

impl fmt::Display for ParseDoubleWordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid double-word literal `{}`", self.0)
    }
}

impl std::error::Error for ParseDoubleWordError {}

impl FromStr for DoubleWord {
    type Err = ParseDoubleWordError;

    /// Parses decimal literals such as `-1.25`, `3e-5`, `inf`, `nan`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDoubleWordError(s.to_string());
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        if matches!(
            lower.as_str(),
            "inf" | "+inf" | "-inf" | "nan" | "infinity" | "-infinity"
        ) {
            return t.parse::<f64>().map(Self::from_f64).map_err(|_| err());
        }
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (mant, exp) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (body, 0),
        };
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        let mut acc = Self::ZERO;
        // Accumulate in chunks of up to 15 digits, each exact in binary64.
        let digits: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).collect();
        if digits.iter().any(|d| !d.is_ascii_digit()) {
            return Err(err());
        }
        for chunk in digits.chunks(15) {
            let mut v = 0u64;
            for d in chunk {
                v = v * 10 + (d - b'0') as u64;
            }
            acc = acc * pow10(chunk.len() as i32) + Self::from_f64(v as f64);
        }
        let scale = exp - frac_part.len() as i32;
        let v = if scale >= 0 {
            acc * pow10(scale)
        } else {
            acc / pow10(-scale)
        };
        Ok(if neg { -v } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_small_sums() {
        let two = DoubleWord::ONE + DoubleWord::ONE;
        assert_eq!((two.hi, two.lo), (2.0, 0.0));
        let s = DoubleWord::ONE + DoubleWord::from_f64(2f64.powi(-60));
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 2f64.powi(-60));
    }

    #[test]
    fn compensated_sum_of_tenths() {
        let tenth = DoubleWord::ONE / DoubleWord::from_f64(10.0);
        let mut acc = DoubleWord::ZERO;
        for _ in 0..1_000_000 {
            acc += tenth;
        }
        let rel = ((acc - DoubleWord::from_f64(1e5)) / DoubleWord::from_f64(1e5))
            .to_f64()
            .abs();
        assert!(rel < 1e-25, "rel = {rel:e}");
    }

    #[test]
    fn sqrt_two_squares_back() {
        let r = DoubleWord::from_f64(2.0).sqrt();
        let e = (r * r - DoubleWord::from_f64(2.0)).to_f64().abs();
        assert!(e < 1e-30);
    }

    #[test]
    fn exp_matches_known_digits() {
        // e = 2.718281828459045235360287471352662497757...
        let e: DoubleWord = "2.718281828459045235360287471352662".parse().unwrap();
        let got = DoubleWord::ONE.exp();
        assert!(((got - e) / e).to_f64().abs() < 1e-30);
        // e^-750 is far below binary64 range; check through the split form.
        let (m, k) = DoubleWord::from_f64(-750.0).exp_split();
        let back = (m.hi.ln() + k as f64 * std::f64::consts::LN_2) + 750.0;
        assert!(back.abs() < 1e-12);
    }

    #[test]
    fn decimal_round_trip_keeps_32_digits() {
        let x = DoubleWord::from_f64(1.0) / DoubleWord::from_f64(3.0);
        let s = x.to_sci_string(34);
        assert!(s.starts_with("3.33333333333333333333333333333"), "{s}");
        let y: DoubleWord = s.parse().unwrap();
        assert!(((x - y) / x).to_f64().abs() < 1e-31);
        let z: DoubleWord = "-1.5e-3".parse().unwrap();
        assert_eq!(z.to_f64(), -1.5e-3);
        assert!("1.2.3".parse::<DoubleWord>().is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(DoubleWord::new(2.5, 1e-20).round(), 3.0);
        assert_eq!(DoubleWord::new(2.5, -1e-20).round(), 2.0);
        assert_eq!(DoubleWord::new(4.0, -1e-20).round(), 4.0);
    }
}
