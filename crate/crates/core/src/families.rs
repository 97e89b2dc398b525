//! The `+B^2_{1,1}` family `x^3 + a x^2 + b x + 1` and the family `F_1` of
//! monic cubics up to translation, with their height orderings.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubicforms::{family_discriminant, is_maximal, MonicCubic};
use crate::exactmath::ratstr;
use crate::numberfield::{make_field, CubicField};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    B112,
    F1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// `max(|a|, |b|)`.
    Symmetric,
    /// `max(|a|, |b|^(1/2))`.
    Weighted,
    /// `max(|I|^3, J^2 / 4)` for the covariants `I`, `J`.
    Covariant,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureFilter {
    #[default]
    TotallyReal,
    Complex,
    Both,
}

impl SignatureFilter {
    pub fn accepts(self, disc: &BigInt) -> bool {
        match self {
            SignatureFilter::TotallyReal => disc.is_positive(),
            SignatureFilter::Complex => disc.is_negative(),
            SignatureFilter::Both => !disc.is_zero(),
        }
    }
}

macro_rules! parse_enum {
    ($t:ty, $what:literal, { $($s:literal => $v:expr),* $(,)? }) => {
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok($v),)*
                    other => Err(Error::Parse(format!(concat!("unknown ", $what, " {:?}"), other))),
                }
            }
        }
    };
}

parse_enum!(FamilyKind, "family", { "b112" => FamilyKind::B112, "f1" => FamilyKind::F1 });
parse_enum!(Ordering, "ordering", {
    "symmetric" => Ordering::Symmetric,
    "weighted" => Ordering::Weighted,
    "covariant" => Ordering::Covariant,
});
parse_enum!(SignatureFilter, "signature", {
    "real" => SignatureFilter::TotallyReal,
    "totally_real" => SignatureFilter::TotallyReal,
    "totally-real" => SignatureFilter::TotallyReal,
    "complex" => SignatureFilter::Complex,
    "both" => SignatureFilter::Both,
});

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::B112 => "b112",
            FamilyKind::F1 => "f1",
        })
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ordering::Symmetric => "symmetric",
            Ordering::Weighted => "weighted",
            Ordering::Covariant => "covariant",
        })
    }
}

impl fmt::Display for SignatureFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignatureFilter::TotallyReal => "real",
            SignatureFilter::Complex => "complex",
            SignatureFilter::Both => "both",
        })
    }
}

/// Heights of a family member. The weighted height is irrational in
/// general, so its square is stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Heights {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub symmetric: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub weighted_squared: Option<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rat")]
    pub covariant: Option<BigRational>,
}

mod opt_rat {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_str(&crate::exactmath::format_rational(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| crate::exactmath::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl Heights {
    /// Symmetric and weighted heights of `x^3 + a x^2 + b x + 1`.
    pub fn b112(a: &BigInt, b: &BigInt) -> Self {
        let a2 = a * a;
        Self {
            symmetric: Some(BigRational::from_integer(a.abs().max(b.abs()))),
            weighted_squared: Some(BigRational::from_integer(a2.max(b.abs()))),
            covariant: None,
        }
    }

    pub fn f1(f: &MonicCubic) -> Self {
        Self {
            covariant: Some(covariant_height(f)),
            ..Self::default()
        }
    }

    /// Whether the height under `ordering` is at most `cap`.
    pub fn within(&self, ordering: Ordering, cap: &BigRational) -> bool {
        match ordering {
            Ordering::Symmetric => self.symmetric.as_ref().is_some_and(|h| h <= cap),
            Ordering::Weighted => {
                !cap.is_negative() && self.weighted_squared.as_ref().is_some_and(|h| *h <= cap * cap)
            }
            Ordering::Covariant => self.covariant.as_ref().is_some_and(|h| h <= cap),
        }
    }

    /// The weighted height as a float, for display.
    pub fn weighted(&self) -> Option<f64> {
        self.weighted_squared.as_ref().and_then(|h| h.to_f64()).map(f64::sqrt)
    }
}

/// `max(|I|^3, J^2 / 4)`.
pub fn covariant_height(f: &MonicCubic) -> BigRational {
    let (i, j) = f.covariants();
    let i3 = BigRational::from_integer(i.abs().pow(3));
    let j2 = BigRational::new(&j * &j, BigInt::from(4));
    i3.max(j2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub signature_filter: SignatureFilter,
    pub ordering: Ordering,
    #[serde(with = "ratstr")]
    pub height_cap: BigRational,
}

impl FamilySpec {
    pub fn new(
        kind: FamilyKind,
        signature_filter: SignatureFilter,
        ordering: Ordering,
        height_cap: BigRational,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            signature_filter,
            ordering,
            height_cap,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.ordering) {
            (FamilyKind::B112, Ordering::Covariant) => {
                Err(Error::domain("the covariant ordering applies to F1 only"))
            }
            (FamilyKind::F1, Ordering::Symmetric | Ordering::Weighted) => {
                Err(Error::domain("F1 is ordered by the covariant height"))
            }
            _ => Ok(()),
        }
    }

    /// Members in enumeration order.
    pub fn members(&self) -> Result<Vec<FamilyMember>> {
        self.validate()?;
        match self.kind {
            FamilyKind::B112 => enumerate_b112(&self.height_cap, self.ordering, self.signature_filter),
            FamilyKind::F1 => enumerate_f1(&self.height_cap, self.signature_filter),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub form: MonicCubic,
    pub heights: Heights,
    #[serde(with = "crate::exactmath::intstr")]
    pub disc: BigInt,
}

impl FamilyMember {
    /// The number field, built on demand.
    pub fn to_field(&self, precision: u32) -> Result<CubicField> {
        make_field(&self.form, precision)
    }
}

fn floor_nonneg(q: &BigRational) -> Option<BigInt> {
    (!q.is_negative()).then(|| q.floor().to_integer())
}

/// Keeps the maximal candidates, checking in parallel and preserving order.
fn keep_maximal(cands: Vec<FamilyMember>) -> Result<Vec<FamilyMember>> {
    let flags = cands
        .par_iter()
        .map(|m| is_maximal(&m.form))
        .collect::<Result<Vec<bool>>>()?;
    Ok(cands
        .into_iter()
        .zip(flags)
        .filter_map(|(m, ok)| ok.then_some(m))
        .collect())
}

/// Congruence class of `(a, b)` mod 4 allowed in the family.
pub fn b112_congruence(a: &BigInt, b: &BigInt) -> bool {
    let four = BigInt::from(4);
    let r = |x: &BigInt| ((x % &four + &four) % &four).to_u8().unwrap_or(0);
    matches!((r(a), r(b)), (0, 0) | (1, 2) | (2, 1))
}

/// Members `(a, b)`, `a, b > 0`, of `x^3 + a x^2 + b x + 1` in the allowed
/// congruence classes that are irreducible and maximal, with height at
/// most `cap`, ordered by `(a, b)`.
pub fn enumerate_b112(
    cap: &BigRational,
    ordering: Ordering,
    filter: SignatureFilter,
) -> Result<Vec<FamilyMember>> {
    let Some(amax) = floor_nonneg(cap) else {
        return Ok(Vec::new());
    };
    let bmax = match ordering {
        Ordering::Symmetric => amax.clone(),
        Ordering::Weighted => (cap * cap).floor().to_integer(),
        Ordering::Covariant => return Err(Error::domain("the covariant ordering applies to F1 only")),
    };
    let amax = amax.to_u64().ok_or_else(|| Error::domain("height cap too large"))?;
    let bmax = bmax.to_u64().ok_or_else(|| Error::domain("height cap too large"))?;
    let mut cands = Vec::new();
    for a in 1..=amax {
        for b in 1..=bmax {
            let (a, b) = (BigInt::from(a), BigInt::from(b));
            if a == b || !b112_congruence(&a, &b) {
                continue;
            }
            let heights = Heights::b112(&a, &b);
            if !heights.within(ordering, cap) {
                continue;
            }
            let disc = family_discriminant(&a, &b);
            if !filter.accepts(&disc) {
                continue;
            }
            let form = MonicCubic::unit(a, b);
            if !form.is_irreducible() {
                continue;
            }
            cands.push(FamilyMember { form, heights, disc });
        }
    }
    keep_maximal(cands)
}

/// Irreducible maximal monic cubics with `a` in `{0, 1, 2}` (one per
/// translation class) and covariant height at most `cap`, ordered by
/// `(a, b, c)`.
pub fn enumerate_f1(cap: &BigRational, filter: SignatureFilter) -> Result<Vec<FamilyMember>> {
    let Some(c0) = floor_nonneg(cap) else {
        return Ok(Vec::new());
    };
    // |I|^3 <= cap and J^2 <= 4 cap, both with integer left sides
    let imax = c0.cbrt();
    let jmax = (cap * BigInt::from(4)).floor().to_integer().sqrt();
    let mut cands = Vec::new();
    let three = BigInt::from(3);
    let t27 = BigInt::from(27);
    for a in 0..3i64 {
        let a = BigInt::from(a);
        let a2 = &a * &a;
        let mut i = imax.clone();
        while i >= -imax.clone() {
            let bnum = &a2 - &i;
            if (&bnum % &three).is_zero() {
                let b = &bnum / &three;
                let base = BigInt::from(-2) * &a2 * &a + BigInt::from(9) * &a * &b;
                let mut j = jmax.clone();
                while j >= -jmax.clone() {
                    let cnum = &base - &j;
                    if (&cnum % &t27).is_zero() {
                        let form = MonicCubic::new(a.clone(), b.clone(), &cnum / &t27);
                        let disc = form.discriminant();
                        let heights = Heights::f1(&form);
                        if filter.accepts(&disc) && heights.within(Ordering::Covariant, cap) && form.is_irreducible() {
                            cands.push(FamilyMember { form, heights, disc });
                        }
                    }
                    j -= 1;
                }
            }
            i -= 1;
        }
    }
    keep_maximal(cands)
}

/// Number of members of `+B^2_{1,1}` of symmetric height at most `cap`,
/// either signature.
pub fn count_maximal_b112(cap: &BigRational) -> Result<usize> {
    Ok(enumerate_b112(cap, Ordering::Symmetric, SignatureFilter::Both)?.len())
}

/// The explicit bound `|disc(a, b)| <= 54 Y^4` for `|a|, |b| <= Y`, with its
/// termwise proof and an exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscBoundCertificate {
    pub y: u64,
    pub constant: u64,
    /// `54 Y^4`.
    #[serde(with = "crate::exactmath::intstr")]
    pub bound: BigInt,
    /// Bounds on `|a^2 b^2|`, `|4a^3|`, `|4b^3|`, `|18ab|`, `27`.
    #[serde(with = "crate::exactmath::intstr::vec")]
    pub term_bounds: Vec<BigInt>,
    /// Largest `|disc|` over the box.
    #[serde(with = "crate::exactmath::intstr")]
    pub exhaustive_max: BigInt,
    pub argmax: (i64, i64),
    pub holds: bool,
}

pub const DISC_BOUND_CONSTANT: u64 = 54;

pub fn height_implies_disc_bound(y: u64) -> Result<DiscBoundCertificate> {
    if y < 1 {
        return Err(Error::domain("the height bound needs Y >= 1"));
    }
    let yi = i64::try_from(y).map_err(|_| Error::domain("Y too large"))?;
    let yb = BigInt::from(y);
    let y2 = &yb * &yb;
    let y3 = &y2 * &yb;
    let y4 = &y2 * &y2;
    let term_bounds = vec![
        y4.clone(),
        BigInt::from(4) * &y3,
        BigInt::from(4) * &y3,
        BigInt::from(18) * &y2,
        BigInt::from(27),
    ];
    let bound = BigInt::from(DISC_BOUND_CONSTANT) * &y4;
    // each term bound is at most its coefficient times Y^4 since Y >= 1
    let termwise: BigInt = term_bounds.iter().sum();
    let mut best = (BigInt::zero(), (0, 0));
    for a in -yi..=yi {
        for b in -yi..=yi {
            let d = family_discriminant(&BigInt::from(a), &BigInt::from(b)).abs();
            if d > best.0 {
                best = (d, (a, b));
            }
        }
    }
    Ok(DiscBoundCertificate {
        y,
        constant: DISC_BOUND_CONSTANT,
        holds: termwise <= bound && best.0 <= bound,
        bound,
        term_bounds,
        exhaustive_max: best.0,
        argmax: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn pairs(ms: &[FamilyMember]) -> Vec<(i64, i64)> {
        ms.iter()
            .map(|m| (m.form.a.to_i64().unwrap(), m.form.b.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn small_b112() {
        let both = pairs(&enumerate_b112(&q(6), Ordering::Symmetric, SignatureFilter::Both).unwrap());
        assert!(both.contains(&(2, 1)) && both.contains(&(5, 6)));
        assert!(!both.contains(&(4, 4)));
        let real = pairs(&enumerate_b112(&q(6), Ordering::Symmetric, SignatureFilter::TotallyReal).unwrap());
        assert!(!real.contains(&(2, 1)) && real.contains(&(5, 6)));
        assert!(enumerate_b112(&q(0), Ordering::Symmetric, SignatureFilter::Both).unwrap().is_empty());
    }

    #[test]
    fn weighted_allows_larger_b() {
        let w = enumerate_b112(&q(3), Ordering::Weighted, SignatureFilter::Both).unwrap();
        assert!(w.iter().all(|m| m.form.a <= 3.into() && m.form.b <= 9.into()));
        assert!(w.iter().any(|m| m.form.b > 3.into()));
    }

    #[test]
    fn f1_heights() {
        let f = MonicCubic::new(0, -1, -1);
        assert_eq!(covariant_height(&f), BigRational::new(729.into(), 4.into()));
        let ms = enumerate_f1(&BigRational::new(729.into(), 4.into()), SignatureFilter::Both).unwrap();
        assert!(ms.iter().any(|m| m.form == f || m.form == MonicCubic::new(0, -1, 1)));
        assert!(enumerate_f1(&q(10), SignatureFilter::TotallyReal).unwrap().is_empty());
    }

    #[test]
    fn disc_bound() {
        let c = height_implies_disc_bound(1).unwrap();
        assert!(c.holds && c.exhaustive_max <= 54.into());
        let c = height_implies_disc_bound(10).unwrap();
        assert!(c.holds && c.exhaustive_max <= BigInt::from(540_000));
        assert!(height_implies_disc_bound(0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(FamilySpec::new(FamilyKind::B112, SignatureFilter::Both, Ordering::Covariant, q(5)).is_err());
        assert!(FamilySpec::new(FamilyKind::F1, SignatureFilter::Both, Ordering::Weighted, q(5)).is_err());
        assert_eq!("real".parse::<SignatureFilter>().unwrap(), SignatureFilter::TotallyReal);
    }
}
