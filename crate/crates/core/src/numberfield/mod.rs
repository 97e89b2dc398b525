//! The cubic field `Q[x]/(f)` whose maximal order is `Z[alpha]`.
//!
//! Elements of the order are integer triples `(x, y, z)` meaning
//! `x + y alpha + z alpha^2`. Embeddings are validated: every real root
//! comes from an exact rational isolating interval, and all derived
//! quantities are [`Interval`]s.

mod ideal;
mod prime;
mod roots;

pub use ideal::{ideal_inverse, ideal_mul, ideal_norm, ideal_pow, FracIdeal};
pub use prime::{split_prime, PrimeIdeal};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cubicforms::{is_maximal, reduce_form, BinaryCubicForm, MonicCubic};
use crate::exactmath::arith::ceil_sqrt;
use crate::exactmath::{Interval, IntMatrix};
use crate::{Error, Result};

/// Starting precision in bits when nothing else is configured.
pub const DEFAULT_PRECISION: u32 = 128;

/// An element `x + y alpha + z alpha^2` of `Z[alpha]`.
pub type Elt = [BigInt; 3];

pub fn elt(x: i64, y: i64, z: i64) -> Elt {
    [x.into(), y.into(), z.into()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub r1: u32,
    pub r2: u32,
}

impl Signature {
    pub fn unit_rank(&self) -> usize {
        (self.r1 + self.r2 - 1) as usize
    }

    pub fn places(&self) -> usize {
        (self.r1 + self.r2) as usize
    }

    pub fn is_totally_real(&self) -> bool {
        self.r2 == 0
    }
}

/// Validated image of `alpha` under one archimedean place.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Embedding {
    Real(Interval),
    /// The root with positive imaginary part.
    Complex { re: Interval, im: Interval },
}

/// A complex interval `(re, im)`.
pub type CInterval = (Interval, Interval);

#[derive(Clone, Debug)]
pub struct CubicField {
    pub defining: MonicCubic,
    pub disc: BigInt,
    pub signature: Signature,
    pub precision: u32,
    /// Exact isolating intervals of the real roots, ascending.
    pub real_roots: Vec<(BigRational, BigRational)>,
    /// Real places first, then the complex one.
    pub embeddings: Vec<Embedding>,
    /// Canonical form of the field's isomorphism class.
    pub reduced_form: BinaryCubicForm,
}

/// Builds the field of a maximal monic cubic, with root enclosures of
/// radius below `2^(-precision/2)`.
pub fn make_field(f: &MonicCubic, precision: u32) -> Result<CubicField> {
    if !f.is_irreducible() {
        return Err(Error::domain(format!("{f} is reducible over Q")));
    }
    if !is_maximal(f)? {
        return Err(Error::domain(format!("Z[x]/({f}) is not maximal")));
    }
    let disc = f.discriminant();
    let signature = if disc.is_positive() {
        Signature { r1: 3, r2: 0 }
    } else {
        Signature { r1: 1, r2: 1 }
    };
    let width = BigRational::new(BigInt::one(), BigInt::one() << (precision / 2).max(1)) * BigInt::from(2);
    let real_roots = roots::isolate_real_roots(&f.to_poly(), &width);
    debug_assert_eq!(real_roots.len() as u32, signature.r1);
    let mut embeddings: Vec<Embedding> = real_roots
        .iter()
        .map(|(lo, hi)| Embedding::Real(Interval::from_rational_bounds(lo, hi)))
        .collect();
    if signature.r2 == 1 {
        let Embedding::Real(r) = embeddings[0] else { unreachable!() };
        let a = Interval::from_int(&f.a);
        let c = Interval::from_int(&f.c);
        // the pair sums to -a - r and multiplies to -c / r
        let re = (-a - r) * 0.5;
        let abs2 = -c / r;
        let im = (abs2 - re.sqr()).sqrt();
        embeddings.push(Embedding::Complex { re, im });
    }
    Ok(CubicField {
        defining: f.clone(),
        disc,
        signature,
        precision,
        real_roots,
        embeddings,
        reduced_form: reduce_form(&BinaryCubicForm::from_monic(f))?,
    })
}

impl CubicField {
    pub fn degree_at(&self, place: usize) -> u32 {
        match self.embeddings[place] {
            Embedding::Real(_) => 1,
            Embedding::Complex { .. } => 2,
        }
    }

    /// `x * y` reduced modulo `f(alpha) = 0`.
    pub fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        let mut c: [BigInt; 5] = Default::default();
        for i in 0..3 {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                c[i + j] += &x[i] * &y[j];
            }
        }
        let (a, b, k) = (&self.defining.a, &self.defining.b, &self.defining.c);
        // alpha^3 = -a alpha^2 - b alpha - k
        // alpha^4 = (a^2 - b) alpha^2 + (ab - k) alpha + ak
        [
            &c[0] - &c[3] * k + &c[4] * a * k,
            &c[1] - &c[3] * b + &c[4] * (a * b - k),
            &c[2] - &c[3] * a + &c[4] * (a * a - b),
        ]
    }

    pub fn pow(&self, x: &Elt, mut e: u32) -> Elt {
        let mut acc: Elt = [BigInt::one(), BigInt::zero(), BigInt::zero()];
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Columns `x`, `x alpha`, `x alpha^2` in the power basis.
    pub fn mul_matrix(&self, x: &Elt) -> IntMatrix {
        let alpha = [BigInt::zero(), BigInt::one(), BigInt::zero()];
        let x1 = self.mul(x, &alpha);
        let x2 = self.mul(&x1, &alpha);
        let cols = [x.clone(), x1, x2];
        IntMatrix::from_rows((0..3).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
    }

    /// Exact norm, the determinant of multiplication by `x`.
    pub fn norm(&self, x: &Elt) -> BigInt {
        let m = self.mul_matrix(x);
        let g = |i, j| m.get(i, j);
        g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
            - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
    }

    pub fn trace(&self, x: &Elt) -> BigInt {
        let m = self.mul_matrix(x);
        m.get(0, 0) + m.get(1, 1) + m.get(2, 2)
    }

    /// `x` under each place, as complex intervals (imaginary part zero at
    /// real places).
    pub fn embed(&self, x: &Elt) -> Vec<CInterval> {
        let xs: Vec<Interval> = x.iter().map(Interval::from_int).collect();
        self.embeddings
            .iter()
            .map(|e| match *e {
                Embedding::Real(r) => (xs[0] + xs[1] * r + xs[2] * r.sqr(), Interval::point(0.0)),
                Embedding::Complex { re, im } => {
                    let re2 = re.sqr() - im.sqr();
                    let im2 = (re * im) * 2.0;
                    (xs[0] + xs[1] * re + xs[2] * re2, xs[1] * im + xs[2] * im2)
                }
            })
            .collect()
    }

    /// `d_i log |sigma_i(x)|` over the places, `d_i` the local degree.
    ///
    /// Each entry is also enclosed as `log |N(x)|` minus the others, which
    /// rescues conjugates lost to cancellation.
    pub fn log_embedding(&self, x: &Elt) -> Vec<Interval> {
        let direct: Vec<Interval> = self
            .embed(x)
            .into_iter()
            .zip(&self.embeddings)
            .map(|((re, im), e)| match e {
                Embedding::Real(_) => re.abs().ln(),
                Embedding::Complex { .. } => (re.sqr() + im.sqr()).ln(),
            })
            .collect();
        let n = self.norm(x);
        if n.is_zero() || direct.iter().any(|l| !l.is_finite()) {
            return direct;
        }
        let total = Interval::from_int(&n.abs()).ln();
        (0..direct.len())
            .map(|j| {
                let rest = (0..direct.len())
                    .filter(|&i| i != j)
                    .fold(total, |acc, i| acc - direct[i]);
                direct[j].meet(&rest)
            })
            .collect()
    }

    /// Midpoint embeddings as `f64` pairs, for Gram matrices that only steer
    /// searches.
    fn embed_approx(&self, x: &Elt) -> Vec<(f64, f64)> {
        self.embed(x).into_iter().map(|(re, im)| (re.mid(), im.mid())).collect()
    }

    /// Gram matrix of `T2(v) = sum_i d_i |sigma_i(v)|^2` on the lattice
    /// spanned by `basis`.
    pub fn t2_gram(&self, basis: &[Elt]) -> Vec<Vec<f64>> {
        self.weighted_gram(basis, &vec![1.0; self.embeddings.len()])
    }

    /// Gram matrix of `sum_i w_i d_i |sigma_i(v)|^2`.
    pub fn weighted_gram(&self, basis: &[Elt], weights: &[f64]) -> Vec<Vec<f64>> {
        let emb: Vec<Vec<(f64, f64)>> = basis.iter().map(|b| self.embed_approx(b)).collect();
        let n = basis.len();
        let mut g = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for (i, w) in weights.iter().enumerate() {
                    let (a, b) = emb[j][i];
                    let (c, d) = emb[k][i];
                    s += w * f64::from(self.degree_at(i)) * (a * c + b * d);
                }
                g[j][k] = s;
            }
        }
        g
    }

    pub fn t2(&self, x: &Elt) -> f64 {
        let g = self.t2_gram(std::slice::from_ref(x));
        g[0][0]
    }

    pub fn one(&self) -> Elt {
        [BigInt::one(), BigInt::zero(), BigInt::zero()]
    }

    pub fn alpha(&self) -> Elt {
        [BigInt::zero(), BigInt::one(), BigInt::zero()]
    }
}

/// Rational upper bound for `(3!/3^3) (4/pi)^r2 sqrt|disc|`.
///
/// Uses `pi > 333/106` and a dyadic upper approximation of the root.
pub fn minkowski_bound(k: &CubicField) -> BigRational {
    const SHIFT: u32 = 32;
    let scaled = k.disc.abs() << (2 * SHIFT);
    let sqrt_up = BigRational::new(ceil_sqrt(&scaled), BigInt::one() << SHIFT);
    let mut b = BigRational::new(2.into(), 9.into()) * sqrt_up;
    for _ in 0..k.signature.r2 {
        b *= BigRational::new(424.into(), 333.into());
    }
    b
}

/// `floor` of the Minkowski bound, as a machine word.
pub fn minkowski_floor(k: &CubicField) -> u64 {
    minkowski_bound(k).floor().to_integer().to_u64().unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(a: i64, b: i64, c: i64) -> CubicField {
        make_field(&MonicCubic::new(a, b, c), DEFAULT_PRECISION).unwrap()
    }

    #[test]
    fn signatures() {
        let k = field(0, -1, -1);
        assert_eq!(k.signature, Signature { r1: 1, r2: 1 });
        assert_eq!(k.disc, BigInt::from(-23));
        let k = field(1, -2, -1);
        assert_eq!((k.signature.r1, k.disc.clone()), (3, BigInt::from(49)));
        let k = field(5, 6, 1);
        assert_eq!((k.signature.r1, k.disc.clone()), (3, BigInt::from(49)));
        assert!(make_field(&MonicCubic::new(1, -2, 8), 128).is_err());
    }

    #[test]
    fn enclosures_contain_roots() {
        for k in [field(0, -1, -1), field(1, -2, -1), field(0, 4, -1)] {
            let f = k.defining.to_poly();
            for e in &k.embeddings {
                match *e {
                    Embedding::Real(r) => {
                        let v = f.coeffs().iter().rev().fold(Interval::point(0.0), |acc, c| {
                            acc * r + Interval::from_int(c)
                        });
                        assert!(v.contains_zero());
                        assert!(r.width() < 1e-12);
                    }
                    Embedding::Complex { re, im } => {
                        assert!(im.lo > 0.0);
                        assert!(re.width() < 1e-12 && im.width() < 1e-12);
                    }
                }
            }
            for (lo, hi) in &k.real_roots {
                let w = hi - lo;
                assert!(w < BigRational::new(2.into(), BigInt::one() << 64));
            }
        }
    }

    #[test]
    fn norms() {
        let k = field(3, 2, 1);
        assert_eq!(k.norm(&elt(1, 0, 0)), BigInt::one());
        assert_eq!(k.norm(&elt(0, 1, 0)), BigInt::from(-1));
        let x = elt(2, -1, 3);
        let y = elt(-1, 4, 1);
        assert_eq!(k.norm(&k.mul(&x, &y)), k.norm(&x) * k.norm(&y));
        // the complex place contributes |z|^2
        let n = k.norm(&x).to_f64().unwrap();
        let e = k.embed(&x);
        let approx = e[0].0 * (e[1].0.sqr() + e[1].1.sqr());
        assert!(approx.contains(n));
    }

    #[test]
    fn minkowski_values() {
        let k = field(0, -1, -1);
        let b = minkowski_bound(&k);
        assert!(b < BigRational::new(136.into(), 100.into()));
        assert!(b > BigRational::new(135.into(), 100.into()));
        let k = field(1, -2, -1);
        let b = minkowski_bound(&k);
        assert!(b >= BigRational::new(14.into(), 9.into()));
        assert!(b < BigRational::new(14_000_001.into(), 9_000_000.into()));
        assert_eq!(minkowski_floor(&k), 1);
    }
}
