//! Closed intervals of `f64` with outward rounding.
//!
//! Every operation widens its result by one ulp on each side, so the true
//! real value stays enclosed regardless of the rounding mode of the host.
//! Transcendental functions are widened by a few ulps to absorb the error
//! of the platform `libm`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "endpoint")]
    pub lo: f64,
    #[serde(with = "endpoint")]
    pub hi: f64,
}

/// JSON has no infinities; they travel as the strings `"inf"` and `"-inf"`.
mod endpoint {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("bad endpoint {s:?}"))),
            },
        }
    }
}

fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

fn down_n(mut x: f64, n: usize) -> f64 {
    for _ in 0..n {
        x = down(x);
    }
    x
}

fn up_n(mut x: f64, n: usize) -> f64 {
    for _ in 0..n {
        x = up(x);
    }
    x
}

impl Interval {
    pub const ENTIRE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(!(lo > hi), "inverted interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    /// Degenerate interval; exact since `x` is representable.
    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn from_int(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(k) if k.unsigned_abs() < (1u64 << 53) => Self::point(k as f64),
            _ => {
                let x = n.to_f64().unwrap_or(f64::NAN);
                Self::new(down_n(x, 2), up_n(x, 2))
            }
        }
    }

    pub fn from_rational(q: &BigRational) -> Self {
        if q.is_integer() {
            return Self::from_int(q.numer());
        }
        let x = q.to_f64().unwrap_or(f64::NAN);
        Self::new(down_n(x, 2), up_n(x, 2))
    }

    /// Encloses a value computed in floating point with an error of at
    /// most `ulps` units in the last place.
    pub fn around(x: f64, ulps: usize) -> Self {
        Self::new(down_n(x, ulps), up_n(x, ulps))
    }

    /// Encloses the rational interval `[lo, hi]`.
    pub fn from_rational_bounds(lo: &BigRational, hi: &BigRational) -> Self {
        let l = Self::from_rational(lo);
        let h = Self::from_rational(hi);
        Self::new(l.lo, h.hi)
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            0.5 * self.lo + 0.5 * self.hi
        } else {
            f64::NAN
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// `true` when every point of `self` lies strictly inside `(lo, hi)`.
    pub fn strictly_inside(&self, lo: f64, hi: f64) -> bool {
        lo < self.lo && self.hi < hi
    }

    /// Common part of two enclosures of the same quantity; `self` when
    /// they are disjoint.
    pub fn meet(&self, other: &Interval) -> Interval {
        let (lo, hi) = (self.lo.max(other.lo), self.hi.min(other.hi));
        if lo <= hi {
            Interval { lo, hi }
        } else {
            *self
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Self::new(0.0, (-self.lo).max(self.hi))
        }
    }

    pub fn sqr(self) -> Self {
        let a = self.abs();
        Self::new(down(a.lo * a.lo).max(0.0), up(a.hi * a.hi))
    }

    pub fn sqrt(self) -> Self {
        let lo = if self.lo <= 0.0 { 0.0 } else { down(self.lo.sqrt()).max(0.0) };
        let hi = if self.hi < 0.0 { f64::NAN } else { up(self.hi.sqrt()) };
        Self::new(lo, hi)
    }

    /// Natural logarithm; a lower end at or below zero maps to `-inf`.
    pub fn ln(self) -> Self {
        let lo = if self.lo <= 0.0 {
            f64::NEG_INFINITY
        } else {
            down_n(self.lo.ln(), 2)
        };
        let hi = if self.hi <= 0.0 {
            f64::NEG_INFINITY
        } else {
            up_n(self.hi.ln(), 2)
        };
        Self::new(lo, hi)
    }

    pub fn exp(self) -> Self {
        Self::new(down_n(self.lo.exp(), 2).max(0.0), up_n(self.hi.exp(), 2))
    }

    pub fn scale_int(self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::point(0.0);
        }
        self * Self::from_int(k)
    }

    pub fn pi() -> Self {
        Self::new(down(std::f64::consts::PI), up(std::f64::consts::PI))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::new(down(self.lo + o.lo), up(self.hi + o.hi))
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::new(down(self.lo - o.hi), up(self.hi - o.lo))
    }
}

fn nan_to(x: f64, fallback: f64) -> f64 {
    if x.is_nan() {
        fallback
    } else {
        x
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        // 0 * inf is taken as 0 for the corner products
        let c = [
            nan_to(self.lo * o.lo, 0.0),
            nan_to(self.lo * o.hi, 0.0),
            nan_to(self.hi * o.lo, 0.0),
            nan_to(self.hi * o.hi, 0.0),
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

impl Div for Interval {
    type Output = Interval;
    fn div(self, o: Interval) -> Interval {
        if o.contains_zero() {
            return Interval::ENTIRE;
        }
        let c = [
            self.lo / o.lo,
            self.lo / o.hi,
            self.hi / o.lo,
            self.hi / o.hi,
        ];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval::new(down(lo), up(hi))
    }
}

impl Add<f64> for Interval {
    type Output = Interval;
    fn add(self, o: f64) -> Interval {
        self + Interval::point(o)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;
    fn mul(self, o: f64) -> Interval {
        self * Interval::point(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses() {
        let third = Interval::point(1.0) / Interval::point(3.0);
        assert!(third.lo < 1.0 / 3.0 + 1e-17 && third.hi > 1.0 / 3.0 - 1e-17);
        let s = (third * 3.0).contains(1.0);
        assert!(s);
        let l = Interval::point(2.0).ln();
        assert!(l.contains(std::f64::consts::LN_2));
        assert!(Interval::new(-1.0, 2.0).sqr().contains(0.0));
        assert_eq!(Interval::new(0.0, 1.0).ln().lo, f64::NEG_INFINITY);
    }

    #[test]
    fn rational_conversion_encloses() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(10));
        let i = Interval::from_rational(&q);
        assert!(i.lo <= 0.1 && 0.1 <= i.hi && i.lo < i.hi);
    }
}
