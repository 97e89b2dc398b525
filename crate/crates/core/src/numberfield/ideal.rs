//! Fractional ideals of `Z[alpha]` as `num / den`, `num` a column HNF.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{CubicField, Elt};
use crate::exactmath::matrix::row_hnf_with_transform;
use crate::exactmath::{hermite_normal_form, IntMatrix};
use crate::{Error, Result};

/// A nonzero fractional ideal in reduced form: `num` is the column HNF of an
/// integral ideal's basis in the power basis, `den > 0`, and no prime
/// divides both `den` and every entry of `num`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FracIdeal {
    pub num: IntMatrix,
    pub den: BigInt,
}

fn columns_to_matrix(cols: &[Elt]) -> IntMatrix {
    IntMatrix::from_rows(
        (0..3)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect(),
    )
}

impl FracIdeal {
    /// Canonicalises `lattice / den`, where the columns of `lattice` span an
    /// ideal of the order.
    pub fn new(lattice: &IntMatrix, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        let h = hermite_normal_form(lattice);
        if h.cols() != 3 {
            return Err(Error::domain("zero ideal"));
        }
        let mut g = den.abs();
        for i in 0..3 {
            for j in 0..3 {
                g = g.gcd(h.get(i, j));
            }
        }
        let sign = if den.is_negative() { -BigInt::one() } else { BigInt::one() };
        let num = IntMatrix::from_rows(
            h.to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|x| x / &g).collect())
                .collect(),
        );
        Ok(Self {
            num,
            den: den * sign / g,
        })
    }

    pub fn unit() -> Self {
        Self {
            num: IntMatrix::identity(3),
            den: BigInt::one(),
        }
    }

    /// The ideal generated by `gens` as an `O`-module.
    pub fn from_generators(k: &CubicField, gens: &[Elt]) -> Result<Self> {
        let alpha = k.alpha();
        let mut cols = Vec::with_capacity(3 * gens.len());
        for g in gens {
            let g1 = k.mul(g, &alpha);
            let g2 = k.mul(&g1, &alpha);
            cols.extend([g.clone(), g1, g2]);
        }
        Self::new(&columns_to_matrix(&cols), BigInt::one())
    }

    pub fn principal(k: &CubicField, x: &Elt) -> Result<Self> {
        Self::from_generators(k, std::slice::from_ref(x))
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    /// Basis of the numerator lattice.
    pub fn basis(&self) -> Vec<Elt> {
        (0..3)
            .map(|j| {
                [
                    self.num.get(0, j).clone(),
                    self.num.get(1, j).clone(),
                    self.num.get(2, j).clone(),
                ]
            })
            .collect()
    }

    /// Whether the integral element `x` lies in the ideal.
    pub fn contains(&self, x: &Elt) -> bool {
        // num is lower triangular; solve num c = den x
        let mut c: Vec<BigInt> = Vec::with_capacity(3);
        for i in 0..3 {
            let mut v = &self.den * &x[i];
            for (j, cj) in c.iter().enumerate() {
                v -= self.num.get(i, j) * cj;
            }
            let (q, r) = v.div_rem(self.num.get(i, i));
            if !r.is_zero() {
                return false;
            }
            c.push(q);
        }
        true
    }
}

pub fn ideal_norm(i: &FracIdeal) -> BigRational {
    let d = i.num.determinant().abs();
    BigRational::new(d, i.den.pow(3))
}

pub fn ideal_mul(k: &CubicField, i: &FracIdeal, j: &FracIdeal) -> FracIdeal {
    let mut cols = Vec::with_capacity(9);
    let bj = j.basis();
    for x in i.basis() {
        for y in &bj {
            cols.push(k.mul(&x, y));
        }
    }
    FracIdeal::new(&columns_to_matrix(&cols), &i.den * &j.den)
        .expect("product of nonzero ideals is nonzero")
}

/// `I^-1`, computed as `(N(A) A^-1) / N(A)` for the numerator `A`, where
/// `N(A) A^-1 = {x in O : x A in N(A) O}` is cut out by congruences.
pub fn ideal_inverse(k: &CubicField, i: &FracIdeal) -> Result<FracIdeal> {
    let n = i.num.determinant().abs();
    if n.is_zero() {
        return Err(Error::domain("zero ideal has no inverse"));
    }
    // rows of [M | n I_9]^t, M stacking the multiplication matrices
    let mut at = IntMatrix::zeros(12, 9);
    for (b, w) in i.basis().iter().enumerate() {
        let m = k.mul_matrix(w);
        for r in 0..3 {
            for c in 0..3 {
                at.set(c, 3 * b + r, m.get(r, c).clone());
            }
        }
    }
    for r in 0..9 {
        at.set(3 + r, r, n.clone());
    }
    let (_, t, rank) = row_hnf_with_transform(&at);
    let mut cols: Vec<Elt> = Vec::new();
    for row in rank..12 {
        cols.push([t.get(row, 0).clone(), t.get(row, 1).clone(), t.get(row, 2).clone()]);
    }
    for c in cols.iter_mut() {
        for x in c.iter_mut() {
            *x *= &i.den;
        }
    }
    FracIdeal::new(&columns_to_matrix(&cols), n)
}

pub fn ideal_pow(k: &CubicField, i: &FracIdeal, e: i64) -> Result<FracIdeal> {
    let base = if e < 0 { ideal_inverse(k, i)? } else { i.clone() };
    let mut e = e.unsigned_abs();
    let mut acc = FracIdeal::unit();
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = ideal_mul(k, &acc, &b);
        }
        e >>= 1;
        if e > 0 {
            b = ideal_mul(k, &b, &b);
        }
    }
    Ok(acc)
}
