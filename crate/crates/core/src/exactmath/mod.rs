//! Exact integer and rational kernels.
//!
//! Everything here is a pure function on immutable values. Integers are
//! arbitrary precision ([`num_bigint::BigInt`]); residues modulo a prime are
//! machine words since the prime itself is a `u64`.

pub mod arith;
pub mod interval;
pub mod lattice;
pub mod matrix;
pub mod modp;
pub mod poly;

pub use interval::Interval;
pub use lattice::{
    enumerate_short_vectors, enumerate_short_vectors_exact, lll_reduce, lll_reduce_gram,
};
pub use matrix::{hermite_normal_form, smith_normal_form, IntMatrix};
pub use modp::{factor_mod_p, ModPoly};
pub use poly::{poly_discriminant, resultant, IntPoly};

use num_bigint::BigInt;
use num_rational::BigRational;

/// A point of the rational plane.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint2 {
    pub x: BigRational,
    pub y: BigRational,
}

impl RationalPoint2 {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Self { x, y }
    }

    pub fn from_ints(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }
}

/// Parses `P/Q` or a bare integer into an exact rational.
pub fn parse_rational(s: &str) -> crate::Result<BigRational> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("expected P/Q rational, got {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Formats a rational as `P/Q`, or `P` when integral.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter storing rationals as `"P/Q"` strings.
pub mod ratstr {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing integers as JSON numbers when they fit in `i64`
/// and as decimal strings otherwise.
pub mod intstr {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match n.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&n.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(BigInt::from(v)),
            Repr::Str(s) => s.trim().parse().map_err(serde::de::Error::custom),
        }
    }

    /// The same encoding for sequences.
    pub mod vec {
        use num_bigint::BigInt;
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            struct W<'a>(&'a BigInt);
            impl serde::Serialize for W<'_> {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    super::serialize(self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for n in v {
                seq.serialize_element(&W(n))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            #[derive(Deserialize)]
            struct W(#[serde(with = "super")] BigInt);
            Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }
}
