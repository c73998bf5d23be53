//! A float with an f64 mantissa and an unbounded binary exponent.
//!
//! Used by the order-direction recurrence, whose terms mix entries that can
//! sit thousands of decades apart.

use std::cmp::Ordering;

/// `x * 2^e` without intermediate overflow.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Splits `x` into `(m, e)` with `x = m * 2^e` and `0.5 <= |m| < 1`.
pub fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    if raw_exp == 0 {
        // subnormal: lift into the normal range first
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let e = raw_exp - 1022;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WideFloat {
    mant: f64,
    exp: i64,
}

impl WideFloat {
    pub const ZERO: WideFloat = WideFloat { mant: 0.0, exp: 0 };
    pub const ONE: WideFloat = WideFloat { mant: 0.5, exp: 1 };

    pub fn from_f64(x: f64) -> Self {
        Self::from_parts(x, 0)
    }

    /// The value `m * 2^e`.
    pub fn from_parts(m: f64, e: i64) -> Self {
        let (mant, de) = frexp(m);
        if mant == 0.0 {
            return Self::ZERO;
        }
        WideFloat { mant, exp: e + de }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0.0
    }

    /// Nearest f64; saturates to infinity or zero outside the f64 range.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.mant, self.exp)
    }

    pub fn ln(&self) -> f64 {
        self.mant.ln() + self.exp as f64 * std::f64::consts::LN_2
    }

    pub fn mul(self, other: WideFloat) -> WideFloat {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::from_parts(self.mant * other.mant, self.exp + other.exp)
    }

    pub fn mul_f64(self, x: f64) -> WideFloat {
        self.mul(WideFloat::from_f64(x))
    }

    pub fn div_f64(self, x: f64) -> WideFloat {
        let (m, e) = frexp(x);
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::from_parts(self.mant / m, self.exp - e)
    }

    pub fn add(self, other: WideFloat) -> WideFloat {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let shift = small.exp - big.exp;
        if shift < -1100 {
            return big;
        }
        Self::from_parts(big.mant + ldexp(small.mant, shift), big.exp)
    }

    pub fn sub(self, other: WideFloat) -> WideFloat {
        self.add(WideFloat { mant: -other.mant, exp: other.exp })
    }

    pub fn abs(self) -> WideFloat {
        WideFloat { mant: self.mant.abs(), exp: self.exp }
    }

    /// `|self - other| / |other|`.
    pub fn relative_difference(self, other: WideFloat) -> f64 {
        if other.is_zero() {
            return if self.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let d = self.sub(other).abs();
        if d.is_zero() {
            return 0.0;
        }
        ldexp(d.mant / other.mant.abs(), d.exp - other.exp)
    }
}

impl PartialOrd for WideFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self.sub(*other);
        d.mant.partial_cmp(&0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frexp_roundtrip() {
        for &x in &[1.0, 0.75, 3.0, 1e-310, 1e300, -2.5, 123456.789] {
            let (m, e) = frexp(x);
            assert!((0.5..1.0).contains(&m.abs()), "{x} -> {m}");
            assert_eq!(ldexp(m, e), x);
        }
    }

    #[test]
    fn wide_arithmetic_spans_huge_range() {
        let tiny = WideFloat::from_parts(1.0, -5000);
        let one = WideFloat::ONE;
        assert_eq!(one.add(tiny), one);
        let sq = tiny.mul(tiny);
        assert!((sq.ln() - (-10000.0 * std::f64::consts::LN_2)).abs() < 1e-9);
        let x = WideFloat::from_f64(3.0).div_f64(4.0);
        assert_eq!(x.to_f64(), 0.75);
        assert!(WideFloat::from_f64(2.0) > one);
        assert_eq!(WideFloat::from_f64(1.5).relative_difference(WideFloat::from_f64(1.0)), 0.5);
    }
}
