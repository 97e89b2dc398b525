//! Integral binary cubic forms and their `GL_2(Z)` reduction.
//!
//! Conventions: `F = a x^3 + b x^2 y + c x y^2 + d y^3`, `(F . g)(x, y) =
//! F(p x + q y, r x + s y)` for `g = [[p, q], [r, s]]`, discriminant
//! `b^2 c^2 - 4 a c^3 - 4 b^3 d - 27 a^2 d^2 + 18 abcd`, and Hessian
//! `P x^2 + Q xy + R y^2` with `P = b^2 - 3ac`, `Q = bc - 9ad`,
//! `R = c^2 - 3bd`; the Hessian has discriminant `-3 disc`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::MonicCubic;
use crate::exactmath::intstr;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryCubicForm {
    #[serde(with = "intstr")]
    pub a: BigInt,
    #[serde(with = "intstr")]
    pub b: BigInt,
    #[serde(with = "intstr")]
    pub c: BigInt,
    #[serde(with = "intstr")]
    pub d: BigInt,
}

pub type Gl2 = [[i64; 2]; 2];

impl BinaryCubicForm {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Self {
        Self {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    /// The homogenisation `x^3 + a x^2 y + b x y^2 + c y^3`.
    pub fn from_monic(f: &MonicCubic) -> Self {
        Self::new(1, f.a.clone(), f.b.clone(), f.c.clone())
    }

    pub fn coeffs(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn discriminant(&self) -> BigInt {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        b * b * c * c - BigInt::from(4) * a * c * c * c - BigInt::from(4) * b * b * b * d
            - BigInt::from(27) * a * a * d * d
            + BigInt::from(18) * a * b * c * d
    }

    /// Hessian coefficients `(P, Q, R)`.
    pub fn hessian(&self) -> (BigInt, BigInt, BigInt) {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        (
            b * b - BigInt::from(3) * a * c,
            b * c - BigInt::from(9) * a * d,
            c * c - BigInt::from(3) * b * d,
        )
    }

    pub fn neg(&self) -> Self {
        Self {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    /// `F(p x + q y, r x + s y)`.
    pub fn act(&self, g: &Gl2) -> Self {
        let [[p, q], [r, s]] = *g;
        let lx = [BigInt::from(p), BigInt::from(q)];
        let ly = [BigInt::from(r), BigInt::from(s)];
        let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (k, coef) in self.coeffs().into_iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            // X^(3-k) Y^k as a homogeneous cubic in x, y
            let mut term = vec![coef.clone()];
            for _ in 0..3 - k {
                term = hmul(&term, &lx);
            }
            for _ in 0..k {
                term = hmul(&term, &ly);
            }
            for (o, t) in out.iter_mut().zip(term) {
                *o += t;
            }
        }
        let [a, b, c, d] = out;
        Self { a, b, c, d }
    }

    /// A point of the upper half plane that moves with the form:
    /// `z(F . g) = g^-1 z(F)` (for `det g = -1`, composed with conjugation).
    /// The Hessian root for positive discriminant, the non-real root of
    /// `F(t, 1)` for negative.
    fn covariant_point(&self) -> (f64, f64) {
        let disc = self.discriminant();
        if disc.is_positive() {
            let (p, q, _) = self.hessian();
            let p = p.to_f64().unwrap();
            let q = q.to_f64().unwrap();
            let im = (BigInt::from(3) * &disc).to_f64().unwrap().sqrt();
            // P > 0 for positive discriminant: the Hessian is definite
            (-q / (2.0 * p), im / (2.0 * p.abs()))
        } else {
            let a = self.a.to_f64().unwrap();
            let (b, c, d) = (
                self.b.to_f64().unwrap() / a,
                self.c.to_f64().unwrap() / a,
                self.d.to_f64().unwrap() / a,
            );
            let r = real_root(b, c, d);
            let re = -(b + r) / 2.0;
            let abs2 = -d / r;
            (re, (abs2 - re * re).max(0.0).sqrt())
        }
    }
}

/// Multiplies a homogeneous polynomial (coefficients from `x^n` down to
/// `y^n`) by a linear form.
fn hmul(poly: &[BigInt], lin: &[BigInt; 2]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); poly.len() + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i] += c * &lin[0];
        out[i + 1] += c * &lin[1];
    }
    out
}

/// The real root of `t^3 + b t^2 + c t + d` when the other two are complex.
fn real_root(b: f64, c: f64, d: f64) -> f64 {
    let f = |t: f64| ((t + b) * t + c) * t + d;
    let m = 1.0 + b.abs().max(c.abs()).max(d.abs());
    let (mut lo, mut hi) = (-m, m);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const EPS: f64 = 1e-9;
const MAX_STEPS: usize = 10_000;

fn in_domain((x, y): (f64, f64)) -> bool {
    (-EPS..=0.5 + EPS).contains(&x) && x * x + y * y >= 1.0 - EPS
}

/// Elements of `GL_2(Z)` with entries in `[-2, 2]`.
fn window() -> &'static [Gl2] {
    static W: OnceLock<Vec<Gl2>> = OnceLock::new();
    W.get_or_init(|| {
        let mut v = Vec::new();
        for p in -2..=2 {
            for q in -2..=2 {
                for r in -2..=2 {
                    for s in -2..=2i64 {
                        if (p * s - q * r).abs() == 1 {
                            v.push([[p, q], [r, s]]);
                        }
                    }
                }
            }
        }
        v
    })
}

fn check_nondegenerate(f: &BinaryCubicForm) -> Result<()> {
    if f.discriminant().is_zero() {
        return Err(Error::domain(format!(
            "degenerate binary cubic form ({}, {}, {}, {})",
            f.a, f.b, f.c, f.d
        )));
    }
    // F(t, 1) has a rational root exactly when the monic
    // t^3 + b t^2 + a c t + a^2 d = a^2 F(t / a, 1) has an integer one
    let monic = MonicCubic::new(f.b.clone(), &f.a * &f.c, &f.a * &f.a * &f.d);
    if f.a.is_zero() || !monic.is_irreducible() {
        return Err(Error::domain(format!(
            "reducible binary cubic form ({}, {}, {}, {})",
            f.a, f.b, f.c, f.d
        )));
    }
    Ok(())
}

/// Moves the covariant point into the fundamental domain
/// `{0 <= Re z <= 1/2, |z| >= 1}`.
fn reduce_point(f: &BinaryCubicForm) -> Result<BinaryCubicForm> {
    let mut g = f.clone();
    for _ in 0..MAX_STEPS {
        let (x, y) = g.covariant_point();
        if !x.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(Error::domain("covariant point lost to rounding"));
        }
        let n = (x + 0.5).floor();
        if n != 0.0 {
            g = g.act(&[[1, n as i64], [0, 1]]);
            continue;
        }
        if x * x + y * y < 1.0 - EPS {
            g = g.act(&[[0, -1], [1, 0]]);
            continue;
        }
        if x < 0.0 {
            g = g.act(&[[-1, 0], [0, 1]]);
        }
        return Ok(g);
    }
    Err(Error::domain("form reduction did not converge"))
}

/// Canonical representative of the `GL_2(Z)` orbit: among orbit members
/// whose covariant point lies in the (slightly widened) fundamental domain,
/// the lexicographically smallest `(a, b, c, d)`.
pub fn reduce_form(f: &BinaryCubicForm) -> Result<BinaryCubicForm> {
    check_nondegenerate(f)?;
    let g = reduce_point(f)?;
    let mut best: Option<BinaryCubicForm> = None;
    for gamma in window() {
        let h = g.act(gamma);
        if !in_domain(h.covariant_point()) {
            continue;
        }
        for cand in [h.neg(), h] {
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    Ok(best.expect("the reduced form itself lies in the domain"))
}

/// Same `GL_2(Z)` orbit; for forms of cubic fields, the same field.
pub fn forms_equivalent(f: &BinaryCubicForm, g: &BinaryCubicForm) -> Result<bool> {
    check_nondegenerate(f)?;
    check_nondegenerate(g)?;
    if f.discriminant() != g.discriminant() {
        return Ok(false);
    }
    Ok(reduce_form(f)? == reduce_form(g)?)
}
