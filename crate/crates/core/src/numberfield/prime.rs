//! Prime ideals from factorizations modulo `p`; valid because `Z[alpha]` is
//! the maximal order.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{CubicField, Elt, FracIdeal};
use crate::exactmath::arith::is_prime_u64;
use crate::exactmath::modp::{factor_mod_p_raw, ModPoly};
use crate::exactmath::IntPoly;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Monic irreducible factor `g` of `f` mod `p`; the prime is `(p, g(alpha))`.
    pub generator_poly: IntPoly,
    pub residue_degree: u32,
    pub ramification: u32,
    pub hnf: FracIdeal,
    /// `beta` with `beta P in pO` and `beta` not in `pO`.
    pub anti_uniformizer: Elt,
}

/// `g(alpha)` for a lift of `g`, of degree at most 3.
fn poly_to_elt(k: &CubicField, g: &ModPoly) -> Elt {
    let mut e: Elt = Default::default();
    for (i, c) in g.coeffs().iter().enumerate().take(3) {
        e[i] = BigInt::from(*c);
    }
    if let Some(top) = g.coeffs().get(3) {
        let top = BigInt::from(*top);
        let f = &k.defining;
        e[0] -= &top * &f.c;
        e[1] -= &top * &f.b;
        e[2] -= &top * &f.a;
    }
    e
}

/// The primes above `p` with their ramification indices and residue degrees.
pub fn split_prime(k: &CubicField, p: u64) -> Result<Vec<PrimeIdeal>> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let f = k.defining.to_poly();
    let fbar = ModPoly::from_int_poly(&f, p);
    let mut out = Vec::new();
    for (g, e) in factor_mod_p_raw(&f, p)? {
        let ge = poly_to_elt(k, &g);
        let hnf = FracIdeal::from_generators(k, &[[BigInt::from(p), BigInt::zero(), BigInt::zero()], ge])?;
        let (q, _) = fbar.div_rem(&g);
        out.push(PrimeIdeal {
            p,
            generator_poly: g.to_int_poly(),
            residue_degree: g.degree().expect("irreducible factor") as u32,
            ramification: e,
            hnf,
            anti_uniformizer: poly_to_elt(k, &q),
        });
    }
    Ok(out)
}

impl PrimeIdeal {
    pub fn norm(&self) -> BigInt {
        BigInt::from(self.p).pow(self.residue_degree)
    }

    /// `v_P(x)` for nonzero integral `x`.
    pub fn valuation(&self, k: &CubicField, x: &Elt) -> Result<u32> {
        if x.iter().all(Zero::is_zero) {
            return Err(Error::domain("valuation of zero"));
        }
        let p = BigInt::from(self.p);
        let mut y = x.clone();
        let mut v = 0;
        loop {
            let z = k.mul(&y, &self.anti_uniformizer);
            if z.iter().any(|c| !(c % &p).is_zero()) {
                return Ok(v);
            }
            y = [&z[0] / &p, &z[1] / &p, &z[2] / &p];
            v += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubicforms::MonicCubic;
    use crate::numberfield::{elt, ideal_mul, ideal_norm, ideal_pow, make_field};
    use num_rational::BigRational;

    #[test]
    fn splitting_types() {
        let k = make_field(&MonicCubic::new(0, -1, -1), 128).unwrap();
        let ps = split_prime(&k, 23).unwrap();
        let mut types: Vec<(u32, u32)> = ps.iter().map(|q| (q.ramification, q.residue_degree)).collect();
        types.sort();
        assert_eq!(types, vec![(1, 1), (2, 1)]);
        let ps = split_prime(&k, 2).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].residue_degree, 3);
        for p in [2u64, 3, 5, 7, 11, 23, 59] {
            let ps = split_prime(&k, p).unwrap();
            let s: u32 = ps.iter().map(|q| q.ramification * q.residue_degree).sum();
            assert_eq!(s, 3);
            let mut prod = crate::numberfield::FracIdeal::unit();
            for q in &ps {
                assert_eq!(ideal_norm(&q.hnf), BigRational::from_integer(q.norm()));
                prod = ideal_mul(&k, &prod, &ideal_pow(&k, &q.hnf, q.ramification as i64).unwrap());
            }
            let pid = crate::numberfield::FracIdeal::principal(&k, &elt(p as i64, 0, 0)).unwrap();
            assert_eq!(prod, pid);
        }
    }

    #[test]
    fn valuations_match_norms() {
        let k = make_field(&MonicCubic::new(0, 4, -1), 128).unwrap();
        for x in [elt(3, 1, 0), elt(2, 0, 1), elt(6, 3, -3), elt(1, -1, 1)] {
            let n = k.norm(&x);
            for p in [2u64, 3, 5, 7] {
                let ps = split_prime(&k, p).unwrap();
                let s: u32 = ps.iter().map(|q| q.residue_degree * q.valuation(&k, &x).unwrap()).sum();
                let mut m = n.clone();
                let mut vp = 0;
                while (&m % p).is_zero() {
                    m /= p;
                    vp += 1;
                }
                assert_eq!(s, vp, "{x:?} at {p}");
            }
        }
    }
}
