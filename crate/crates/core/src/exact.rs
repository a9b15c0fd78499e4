//! Exact dyadic arithmetic.
//!
//! Every mass, capacity, length and functional value in the crate is a
//! dyadic rational `num / 2^exp`. Sums and products of dyadics are dyadic, so
//! min-cut values, the coarea identity and the perimeter identities can be
//! compared with zero tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of fractional bits of the global capacity scale.
pub const DEFAULT_SCALE_BITS: u32 = 16;

/// Largest numerator accepted for a single stored quantity.
const MAX_STORED: i64 = 1 << 61;

/// A dyadic rational `num / 2^exp`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        Dyadic { num, exp }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic { num: n as i128, exp: 0 }
    }

    /// Numerator at the stored exponent.
    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    /// Numerator of this value expressed over `2^exp`. Panics if the value is
    /// not representable at that exponent or the shift overflows.
    pub fn numerator_at(&self, exp: u32) -> i128 {
        if exp >= self.exp {
            let shift = exp - self.exp;
            self.num
                .checked_mul(1i128 << shift)
                .expect("dyadic numerator overflow")
        } else {
            let shift = self.exp - exp;
            assert!(
                self.num % (1i128 << shift) == 0,
                "dyadic value not representable at exponent {exp}"
            );
            self.num >> shift
        }
    }

    /// Smallest exponent at which this value is exactly representable.
    pub fn reduced(&self) -> Self {
        if self.num == 0 {
            return Dyadic::ZERO;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        Dyadic {
            num: self.num >> tz,
            exp: self.exp - tz,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.exp as i32)
    }

    /// `2^exp`, the integer denominator used when serializing.
    pub fn scale(&self) -> u128 {
        1u128 << self.exp
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    fn aligned(a: Dyadic, b: Dyadic) -> (i128, i128, u32) {
        let exp = a.exp.max(b.exp);
        (a.numerator_at(exp), b.numerator_at(exp), exp)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        let (a, b, exp) = Dyadic::aligned(self, rhs);
        Dyadic {
            num: a.checked_add(b).expect("dyadic addition overflow"),
            exp,
        }
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        self + (-rhs)
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            exp: self.exp,
        }
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        let a = self.reduced();
        let b = rhs.reduced();
        Dyadic {
            num: a.num.checked_mul(b.num).expect("dyadic product overflow"),
            exp: a.exp + b.exp,
        }
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |acc, x| acc + x)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(self.reduced(), other.reduced());
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// Serialized form of an exact value: `numerator / scale` plus a decimal
/// rendering for humans.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactValue {
    pub numerator: i128,
    pub scale: u128,
    pub decimal: String,
}

impl From<Dyadic> for ExactValue {
    fn from(d: Dyadic) -> Self {
        let r = d.reduced();
        ExactValue {
            numerator: r.num,
            scale: r.scale(),
            decimal: format!("{}", r.to_f64()),
        }
    }
}

impl ExactValue {
    pub fn to_dyadic(&self) -> Result<Dyadic> {
        if !self.scale.is_power_of_two() {
            return Err(Error::CapacityScale(format!(
                "scale {} is not a power of two",
                self.scale
            )));
        }
        Ok(Dyadic::new(self.numerator, self.scale.trailing_zeros()))
    }
}

/// Fixed-point scale shared by all stored masses, capacities and lengths of a
/// space: a stored integer `n` means `n / 2^bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scale {
    bits: u32,
}

impl Default for Scale {
    fn default() -> Self {
        Scale {
            bits: DEFAULT_SCALE_BITS,
        }
    }
}

impl Scale {
    pub fn new(bits: u32) -> Result<Self> {
        if bits > 40 {
            return Err(Error::CapacityScale(format!(
                "scale 2^{bits} exceeds the supported maximum 2^40"
            )));
        }
        Ok(Scale { bits })
    }

    /// Builds a scale from an integer denominator, which must be a power of two.
    pub fn from_denominator(denominator: u64) -> Result<Self> {
        if !denominator.is_power_of_two() {
            return Err(Error::CapacityScale(format!(
                "capacity scale {denominator} is not a power of two"
            )));
        }
        Scale::new(denominator.trailing_zeros())
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn denominator(&self) -> u64 {
        1u64 << self.bits
    }

    /// Rounds a nonnegative real quantity to the nearest stored integer.
    ///
    /// Rejects non-finite or negative input, values too large for the stored
    /// range, and strictly positive values that would round to zero.
    pub fn quantize(&self, x: f64) -> Result<i64> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::CapacityScale(format!(
                "quantity {x} must be finite and nonnegative"
            )));
        }
        let y = (x * self.denominator() as f64).round();
        if y >= MAX_STORED as f64 {
            return Err(Error::CapacityScale(format!(
                "quantity {x} overflows scale 2^{}",
                self.bits
            )));
        }
        if x > 0.0 && y == 0.0 {
            return Err(Error::CapacityScale(format!(
                "quantity {x} is below the resolution of scale 2^-{}",
                self.bits
            )));
        }
        Ok(y as i64)
    }

    /// Stored integer as an exact value.
    pub fn value(&self, stored: i64) -> Dyadic {
        Dyadic::new(stored as i128, self.bits)
    }

    /// Quantizes an exact value to this scale, rounding up. Used for λ so that
    /// strict lower bounds survive quantization.
    pub fn ceil(&self, d: Dyadic) -> Dyadic {
        if d.exp <= self.bits {
            return Dyadic::new(d.numerator_at(self.bits), self.bits);
        }
        let shift = d.exp - self.bits;
        let q = d.num >> shift;
        let exact = q << shift == d.num;
        Dyadic::new(if exact { q } else { q + 1 }, self.bits)
    }

    /// Smallest value on this scale that is strictly greater than `d`.
    pub fn next_above(&self, d: Dyadic) -> Dyadic {
        let c = self.ceil(d);
        if c == d {
            c + Dyadic::new(1, self.bits)
        } else {
            c
        }
    }

    /// Smallest positive representable value.
    pub fn ulp(&self) -> Dyadic {
        Dyadic::new(1, self.bits)
    }
}

/// Exact reciprocal of a positive dyadic rounded up to `bits` fractional bits.
pub fn reciprocal_ceil(d: Dyadic, bits: u32) -> Result<Dyadic> {
    if d.num <= 0 {
        return Err(Error::Precondition("reciprocal of a nonpositive value".into()));
    }
    // 1/d = 2^exp / num; at `bits` fractional bits the numerator is
    // ceil(2^(exp+bits) / num).
    let shift = d.exp + bits;
    if shift >= 126 {
        return Err(Error::CapacityScale("reciprocal overflows".into()));
    }
    let top = 1i128 << shift;
    let q = top / d.num;
    let q = if q * d.num == top { q } else { q + 1 };
    Ok(Dyadic::new(q, bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_is_value_based() {
        assert_eq!(Dyadic::new(2, 1), Dyadic::ONE);
        assert!(Dyadic::new(3, 2) < Dyadic::ONE);
        assert!(Dyadic::new(-1, 0) < Dyadic::ZERO);
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = Dyadic::new(1, 2);
        let b = Dyadic::new(1, 3);
        assert_eq!(a + b, Dyadic::new(3, 3));
        assert_eq!(a * b, Dyadic::new(1, 5));
        assert_eq!(a - b, Dyadic::new(1, 3));
    }

    #[test]
    fn quantize_rejects_underflow_and_negative() {
        let s = Scale::new(4).unwrap();
        assert_eq!(s.quantize(0.25).unwrap(), 4);
        assert!(s.quantize(1e-9).is_err());
        assert!(s.quantize(-1.0).is_err());
        assert_eq!(s.quantize(0.0).unwrap(), 0);
    }

    #[test]
    fn next_above_is_strict() {
        let s = Scale::new(4).unwrap();
        assert_eq!(s.next_above(Dyadic::ONE), Dyadic::new(17, 4));
        assert_eq!(s.next_above(Dyadic::new(1, 6)), Dyadic::new(1, 4));
        assert_eq!(reciprocal_ceil(Dyadic::new(3, 0), 4).unwrap(), Dyadic::new(6, 4));
    }

    #[test]
    fn exact_value_round_trip() {
        let d = Dyadic::new(12, 5);
        let e = ExactValue::from(d);
        assert_eq!(e.numerator, 3);
        assert_eq!(e.scale, 8);
        assert_eq!(e.to_dyadic().unwrap(), d);
    }
}
