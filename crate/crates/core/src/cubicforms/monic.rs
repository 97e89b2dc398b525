//! Monic cubics `x^3 + a x^2 + b x + c`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmath::arith::{factor_integer, is_prime_u64, DEFAULT_RHO_EFFORT};
use crate::exactmath::modp::{factor_mod_p_raw, ModPoly};
use crate::exactmath::{intstr, IntPoly};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonicCubic {
    #[serde(with = "intstr")]
    pub a: BigInt,
    #[serde(with = "intstr")]
    pub b: BigInt,
    #[serde(with = "intstr")]
    pub c: BigInt,
}

impl MonicCubic {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        }
    }

    /// `x^3 + a x^2 + b x + 1`.
    pub fn unit(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self::new(a, b, 1)
    }

    pub fn to_poly(&self) -> IntPoly {
        IntPoly::new(vec![
            self.c.clone(),
            self.b.clone(),
            self.a.clone(),
            BigInt::one(),
        ])
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        ((x + &self.a) * x + &self.b) * x + &self.c
    }

    /// `18abc - 4a^3 c + a^2 b^2 - 4b^3 - 27c^2`.
    pub fn discriminant(&self) -> BigInt {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        BigInt::from(18) * a * b * c - BigInt::from(4) * a * a * a * c + a * a * b * b
            - BigInt::from(4) * b * b * b
            - BigInt::from(27) * c * c
    }

    /// Monic cubics are reducible over the rationals exactly when they have
    /// an integer root.
    pub fn is_irreducible(&self) -> bool {
        cubic_integer_roots(&self.a, &self.b, &self.c).is_empty()
    }

    /// The covariants `(a^2 - 3b, -2a^3 + 9ab - 27c)`; both are invariant
    /// under `x -> x + n`, and `4 I^3 - J^2 = 27 disc`.
    pub fn covariants(&self) -> (BigInt, BigInt) {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let i = a * a - BigInt::from(3) * b;
        let j = BigInt::from(-2) * a * a * a + BigInt::from(9) * a * b - BigInt::from(27) * c;
        (i, j)
    }
}

impl fmt::Display for MonicCubic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_poly().fmt(f)
    }
}

/// `a^2 b^2 - 4a^3 - 4b^3 + 18ab - 27`, the discriminant of `x^3 + a x^2 + b x + 1`.
pub fn family_discriminant(a: &BigInt, b: &BigInt) -> BigInt {
    a * a * b * b - BigInt::from(4) * a * a * a - BigInt::from(4) * b * b * b
        + BigInt::from(18) * a * b
        - BigInt::from(27)
}

/// `f(x + n)`.
pub fn translate(f: &MonicCubic, n: &BigInt) -> MonicCubic {
    let (a, b) = (&f.a, &f.b);
    MonicCubic {
        a: a + BigInt::from(3) * n,
        b: b + BigInt::from(2) * a * n + BigInt::from(3) * n * n,
        c: f.eval(n),
    }
}

/// All integers `n` with `f(n) = 1`, i.e. translates of `f` with constant
/// coefficient 1. A cubic equation has at most three such solutions.
pub fn unit_constant_translates(f: &MonicCubic) -> Vec<BigInt> {
    let roots = cubic_integer_roots(&f.a, &f.b, &(&f.c - 1));
    assert!(roots.len() <= 3, "cubic with more than three integer roots");
    roots
}

/// Integer roots of `x^3 + a x^2 + b x + c`, ascending.
///
/// Splits `[-B, B]` (Cauchy bound) at integers around the critical points,
/// then binary searches each monotone stretch.
pub(crate) fn cubic_integer_roots(a: &BigInt, b: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| ((x + a) * x + b) * x + c;
    let bound = BigInt::one() + a.abs().max(b.abs()).max(c.abs());
    let mut marks = vec![-bound.clone(), bound.clone()];
    let d = BigInt::from(4) * a * a - BigInt::from(12) * b;
    if d.is_positive() {
        let s: BigInt = d.sqrt();
        let two_a = BigInt::from(2) * a;
        for num in [-&two_a - &s, -&two_a + &s] {
            let center = num.div_floor(&BigInt::from(6));
            for k in -2..=3 {
                let m = &center + k;
                if m > -bound.clone() && m < bound {
                    marks.push(m);
                }
            }
        }
    }
    marks.sort();
    marks.dedup();
    let mut roots = Vec::new();
    let vals: Vec<BigInt> = marks.iter().map(&f).collect();
    for (m, v) in marks.iter().zip(&vals) {
        if v.is_zero() {
            roots.push(m.clone());
        }
    }
    for i in 0..marks.len() - 1 {
        let (mut lo, mut hi) = (marks[i].clone(), marks[i + 1].clone());
        let (flo, fhi) = (&vals[i], &vals[i + 1]);
        if flo.is_zero() || fhi.is_zero() || flo.signum() == fhi.signum() {
            continue;
        }
        let rising = flo.is_negative();
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            let v = f(&mid);
            if v.is_zero() {
                roots.push(mid);
                break;
            }
            if v.is_negative() == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{p} is not prime")))
    }
}

/// Dedekind's criterion: is `Z[x]/(f)` maximal at `p`?
pub fn dedekind_is_maximal_at(f: &MonicCubic, p: u64) -> Result<bool> {
    check_prime(p)?;
    if !f.is_irreducible() {
        return Err(Error::domain(format!("{f} is reducible over Q")));
    }
    Ok(dedekind_unchecked(f, p))
}

fn dedekind_unchecked(f: &MonicCubic, p: u64) -> bool {
    let fz = f.to_poly();
    let factors = factor_mod_p_raw(&fz, p).expect("monic polynomial is nonzero mod p");
    let mut g = ModPoly::one(p);
    let mut h = ModPoly::one(p);
    for (gi, e) in &factors {
        g = g.mul(gi);
        for _ in 1..*e {
            h = h.mul(gi);
        }
    }
    // (g h - f) / p with g, h lifted to coefficients in [0, p)
    let gh = g.to_int_poly().mul(&h.to_int_poly());
    let diff = gh.sub(&fz);
    let pz = BigInt::from(p);
    let big_f = IntPoly::new(diff.coeffs().iter().map(|c| c / &pz).collect());
    let fbar = ModPoly::from_int_poly(&big_f, p);
    fbar.gcd(&g).gcd(&h).is_one()
}

/// True when `Z[x]/(f)` is the maximal order of `Q[x]/(f)`.
///
/// Only primes whose square divides the discriminant need testing; if the
/// discriminant cannot be fully factored the answer is an
/// [`Error::Unresolved`], never a guess.
pub fn is_maximal(f: &MonicCubic) -> Result<bool> {
    if !f.is_irreducible() {
        return Err(Error::domain(format!("{f} is reducible over Q")));
    }
    let disc = f.discriminant();
    for (p, e) in factor_integer(&disc, DEFAULT_RHO_EFFORT)? {
        if e < 2 {
            continue;
        }
        let p: u64 = p.clone()
            .try_into()
            .map_err(|_| Error::Unresolved(format!("square prime factor {p} exceeds u64")))?;
        if !dedekind_unchecked(f, p) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `omega(D) - 1` for the fundamental discriminant `D` of `Q(sqrt d)`, `d < 0`.
pub fn quadratic_genus_two_rank(d: i64) -> Result<u32> {
    if d >= 0 {
        return Err(Error::domain(format!("{d} is not negative")));
    }
    let dd = BigInt::from(d);
    let fac = factor_integer(&dd, DEFAULT_RHO_EFFORT)?;
    if fac.iter().any(|(_, e)| *e > 1) {
        return Err(Error::domain(format!("{d} is not squarefree")));
    }
    let mut omega = fac.len() as u32;
    if d.rem_euclid(4) != 1 && !fac.iter().any(|(p, _)| p == &BigInt::from(2)) {
        omega += 1;
    }
    Ok(omega - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_roots(a: i64, b: i64, c: i64) -> Vec<BigInt> {
        let bound = 1 + a.abs().max(b.abs()).max(c.abs());
        (-bound..=bound)
            .filter(|&x| x * x * x + a * x * x + b * x + c == 0)
            .map(BigInt::from)
            .collect()
    }

    #[test]
    fn integer_roots_match_brute_force() {
        for a in -12..=12 {
            for b in -12..=12 {
                for c in [-30, -6, -1, 0, 1, 2, 8, 24] {
                    let got = cubic_integer_roots(&a.into(), &b.into(), &c.into());
                    assert_eq!(got, brute_roots(a, b, c), "{a} {b} {c}");
                }
            }
        }
        // (x-1000)(x+7)(x-3)
        let got = cubic_integer_roots(&(-996).into(), &(-4021).into(), &21000.into());
        assert_eq!(got, vec![BigInt::from(-7), 3.into(), 1000.into()]);
    }

    #[test]
    fn translate_examples() {
        let f = MonicCubic::new(0, -1, 1);
        assert_eq!(translate(&f, &1.into()), MonicCubic::new(3, 2, 1));
        assert_eq!(translate(&f, &0.into()), f);
        let g = MonicCubic::new(5, -7, 11);
        assert_eq!(translate(&translate(&g, &4.into()), &(-4).into()), g);
        assert_eq!(translate(&g, &9.into()).discriminant(), g.discriminant());
    }

    #[test]
    fn unit_translates() {
        let v = |a, b| unit_constant_translates(&MonicCubic::unit(a, b));
        assert_eq!(v(0, -1), vec![BigInt::from(-1), 0.into(), 1.into()]);
        assert_eq!(v(1, 2), vec![BigInt::from(0)]);
        assert_eq!(v(0, -3), vec![BigInt::from(0)]);
    }

    #[test]
    fn maximality_examples() {
        let f = MonicCubic::new(0, -1, -1);
        assert!(dedekind_is_maximal_at(&f, 23).unwrap());
        let g = MonicCubic::new(1, -2, 8);
        assert!(!dedekind_is_maximal_at(&g, 2).unwrap());
        assert!(!is_maximal(&g).unwrap());
        assert!(dedekind_is_maximal_at(&MonicCubic::new(1, 2, 1), 2).unwrap());
        assert!(is_maximal(&MonicCubic::unit(3, 2)).unwrap());
        assert!(dedekind_is_maximal_at(&f, 4).is_err());
        assert!(is_maximal(&MonicCubic::unit(4, 4)).is_err());
    }

    #[test]
    fn genus() {
        assert_eq!(quadratic_genus_two_rank(-1).unwrap(), 0);
        assert_eq!(quadratic_genus_two_rank(-5).unwrap(), 1);
        assert_eq!(quadratic_genus_two_rank(-21).unwrap(), 2);
        assert_eq!(quadratic_genus_two_rank(-3).unwrap(), 0);
        assert_eq!(quadratic_genus_two_rank(-2).unwrap(), 0);
        assert!(quadratic_genus_two_rank(-4).is_err());
        assert!(quadratic_genus_two_rank(3).is_err());
    }
}
