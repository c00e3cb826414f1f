//! Double-word arithmetic for the few places that need it.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dw {
    pub hi: f64,
    pub lo: f64,
}

impl From<f64> for Dw {
    fn from(hi: f64) -> Self {
        Dw { hi, lo: 0.0 }
    }
}

impl Dw {
    pub fn sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Dw {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    pub fn quick(a: f64, b: f64) -> Self {
        let s = a + b;
        Dw { hi: s, lo: b - (s - a) }
    }

    pub fn add(self, o: Dw) -> Self {
        let s = Dw::sum(self.hi, o.hi);
        Dw::quick(s.hi, s.lo + self.lo + o.lo)
    }

    pub fn mul_f(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        Dw::quick(p, e)
    }

    pub fn mul(self, o: Dw) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        Dw::quick(p, e)
    }

    pub fn neg(self) -> Self {
        Dw {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    pub fn div(self, o: Dw) -> Self {
        let q = self.hi / o.hi;
        let r = self.add(o.mul_f(q).neg());
        Dw::quick(q, r.value() / o.hi)
    }

    pub fn div_f(self, b: f64) -> Self {
        let q = self.hi / b;
        let p = q * b;
        let e = q.mul_add(b, -p);
        let r = ((self.hi - p) - e + self.lo) / b;
        Dw::quick(q, r)
    }
}
