//! Polynomials over the prime field F_p and their factorization.
//!
//! Factorization runs squarefree decomposition, then distinct-degree
//! splitting, then equal-degree splitting (Cantor-Zassenhaus; the trace map
//! for p = 2). Random choices come from a ChaCha stream seeded by the input,
//! so the output is reproducible.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::arith::{is_prime_u64, pow_mod};
use super::poly::IntPoly;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModPoly {
    p: u64,
    c: Vec<u64>,
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

impl ModPoly {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        Self { p, c }
    }

    pub fn from_int_poly(f: &IntPoly, p: u64) -> Self {
        let pb = BigInt::from(p);
        let c = f
            .coeffs()
            .iter()
            .map(|x| {
                let r = ((x % &pb) + &pb) % &pb;
                r.to_u64().expect("residue fits")
            })
            .collect();
        Self::new(p, c)
    }

    pub fn to_int_poly(&self) -> IntPoly {
        IntPoly::new(self.c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.c
            .iter()
            .rev()
            .fold(0, |acc, &k| (mulm(acc, x, self.p) + k) % self.p)
    }

    pub fn add(&self, o: &ModPoly) -> ModPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                ((a as u128 + b as u128) % self.p as u128) as u64
            })
            .collect();
        ModPoly::new(self.p, c)
    }

    pub fn sub(&self, o: &ModPoly) -> ModPoly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).copied().unwrap_or(0);
                let b = o.c.get(i).copied().unwrap_or(0);
                ((a as u128 + self.p as u128 - b as u128) % self.p as u128) as u64
            })
            .collect();
        ModPoly::new(self.p, c)
    }

    pub fn mul(&self, o: &ModPoly) -> ModPoly {
        if self.is_zero() || o.is_zero() {
            return ModPoly::new(self.p, vec![]);
        }
        let mut out = vec![0u128; self.c.len() + o.c.len() - 1];
        let p = self.p as u128;
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        ModPoly::new(self.p, out.into_iter().map(|x| x as u64).collect())
    }

    pub fn scale(&self, k: u64) -> ModPoly {
        ModPoly::new(self.p, self.c.iter().map(|&x| mulm(x, k, self.p)).collect())
    }

    pub fn monic(&self) -> ModPoly {
        match self.c.last() {
            Some(&lc) => self.scale(inv(lc, self.p)),
            None => self.clone(),
        }
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &ModPoly) -> (ModPoly, ModPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let p = self.p;
        let lc_inv = inv(d.c[dd], p);
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (ModPoly::new(p, vec![]), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let coef = mulm(r[i], lc_inv, p);
            if coef == 0 {
                continue;
            }
            q[i - dd] = coef;
            for j in 0..=dd {
                let sub = mulm(coef, d.c[j], p);
                r[i - dd + j] = (r[i - dd + j] + p - sub) % p;
            }
        }
        (ModPoly::new(p, q), ModPoly::new(p, r))
    }

    pub fn rem(&self, d: &ModPoly) -> ModPoly {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &ModPoly) -> ModPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> ModPoly {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| mulm(x, i as u64 % self.p, self.p))
            .collect();
        ModPoly::new(self.p, c)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, e: &BigUint, m: &ModPoly) -> ModPoly {
        let mut acc = ModPoly::one(self.p).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m);
            if e.bit(i) {
                acc = acc.mul(&base).rem(m);
            }
        }
        acc
    }

    /// Number of distinct roots in F_p.
    pub fn count_roots(&self) -> usize {
        if self.is_zero() {
            return self.p as usize;
        }
        let f = self.monic();
        let xp = ModPoly::x(self.p).pow_mod(&BigUint::from(self.p), &f);
        let g = xp.sub(&ModPoly::x(self.p)).gcd(&f);
        g.degree().unwrap_or(0)
    }
}

fn squarefree_decomposition(f: &ModPoly) -> Vec<(ModPoly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    let fd = f.derivative();
    if fd.is_zero() {
        if f.degree() == Some(0) {
            return out;
        }
        // f is a p-th power: take the p-th root coefficient-wise
        let root = ModPoly::new(
            p,
            f.c.iter().step_by(p as usize).copied().collect(),
        );
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&fd);
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while w.degree() != Some(0) {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if z.degree() != Some(0) {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if c.degree() != Some(0) {
        let root = ModPoly::new(p, c.c.iter().step_by(p as usize).copied().collect());
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p as u32));
        }
    }
    out
}

fn distinct_degree(f: &ModPoly) -> Vec<(ModPoly, usize)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut rest = f.monic();
    let x = ModPoly::x(p);
    let mut h = x.clone();
    let pe = BigUint::from(p);
    let mut d = 1;
    while let Some(deg) = rest.degree() {
        if deg < 2 * d {
            if deg > 0 {
                out.push((rest.clone(), deg));
            }
            break;
        }
        h = h.pow_mod(&pe, &rest);
        let g = h.sub(&x).gcd(&rest);
        if g.degree() != Some(0) {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    out
}

fn equal_degree(f: &ModPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
    let p = f.p;
    let n = f.degree().unwrap_or(0);
    if n <= d {
        return vec![f.monic()];
    }
    loop {
        let a = ModPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace from F_{2^d} to F_2
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..d {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
            a.pow_mod(&e, f).sub(&ModPoly::one(p))
        };
        let g = b.gcd(f);
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            let h = f.div_rem(&g).0;
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&h, d, rng));
            return out;
        }
    }
}

fn sort_key(g: &ModPoly) -> (usize, Vec<u64>) {
    (g.c.len(), g.c.iter().rev().copied().collect())
}

/// Monic irreducible factors of `f` over F_p with multiplicities.
///
/// Factors are returned as integer polynomials with coefficients in
/// `[0, p)`, sorted by degree and then coefficients.
pub fn factor_mod_p(f: &IntPoly, p: u64) -> Result<Vec<(IntPoly, u32)>> {
    Ok(factor_mod_p_raw(f, p)?
        .into_iter()
        .map(|(g, m)| (g.to_int_poly(), m))
        .collect())
}

pub(crate) fn factor_mod_p_raw(f: &IntPoly, p: u64) -> Result<Vec<(ModPoly, u32)>> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let fp = ModPoly::from_int_poly(f, p);
    if fp.is_zero() {
        return Err(Error::domain("polynomial vanishes modulo p"));
    }
    let mut seed = p;
    for &c in &fp.c {
        seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(c);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (sq, mult) in squarefree_decomposition(&fp.monic()) {
        for (block, d) in distinct_degree(&sq) {
            for g in equal_degree(&block, d, &mut rng) {
                out.push((g, mult));
            }
        }
    }
    out.sort_by_key(|(g, m)| (sort_key(g), *m));
    Ok(out)
}
