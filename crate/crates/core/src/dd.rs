//! Minimal double-double (~31 significant digits) arithmetic.
//!
//! Used where plain `f64` loses too much to cancellation: the ascending
//! Bessel series at large order (terms exceed the sum by many orders of
//! magnitude) and argument reduction of `x - (2v+1)pi/4` in the asymptotic
//! expansion.

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    debug_assert!(a == 0.0 || a.abs() >= b.abs() || a.is_nan());
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    /// 2*pi to double-double precision.
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    /// pi/4 to double-double precision.
    pub const FRAC_PI_4: Dd = Dd {
        hi: 0.7853981633974483,
        lo: 3.061616997868383e-17,
    };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        let (s, e) = two_sum(self.hi, other);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd {
            hi: -other.hi,
            lo: -other.lo,
        })
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, other: f64) -> Dd {
        let q1 = self.hi / other;
        let (p, e) = two_prod(q1, other);
        let r = ((self.hi - p) - e + self.lo) / other;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> f64 {
        self.to_f64().abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_exactness() {
        // (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60, exactly representable in dd
        let x = Dd::from_f64(1.0 + 2f64.powi(-30));
        let sq = x.mul(x);
        let expect_hi = 1.0 + 2f64.powi(-29);
        assert_eq!(sq.hi, expect_hi + 2f64.powi(-60));
        // the dd value carries the full product
        let err = (sq.hi - expect_hi) + sq.lo - 2f64.powi(-60);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn div_roundtrip() {
        let x = Dd::from_f64(std::f64::consts::PI);
        let y = x.div_f64(7.0).mul_f64(7.0);
        assert!((y.hi - x.hi).abs() < 1e-30 + 1e-16 * 0.0 || (y.sub(x)).abs() < 1e-30);
    }

    #[test]
    fn two_pi_constant() {
        // 2*pi = 6.283185307179586476925286766559...
        let tp = Dd::TWO_PI;
        let err = tp.hi - 6.283185307179586 + (tp.lo - 2.4492935982947064e-16);
        assert_eq!(err, 0.0);
    }
}
