//! Real root isolation by Sturm sequences over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exactmath::IntPoly;

type QPoly = Vec<BigRational>;

fn trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn rem(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let k = r.len() - 1;
        let q = &r[k] / lead;
        for (i, bc) in b.iter().enumerate() {
            let idx = k - db + i;
            r[idx] = &r[idx] - &q * bc;
        }
        r = trim(r);
        if r.len() == k + 1 {
            r.pop();
        }
    }
    trim(r)
}

fn sturm_sequence(f: &IntPoly) -> Vec<QPoly> {
    let to_q = |p: &IntPoly| -> QPoly {
        p.coeffs()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    };
    let mut seq = vec![to_q(f), to_q(&f.derivative())];
    loop {
        let n = seq.len();
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| if v.is_positive() { 1 } else { -1 })
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Disjoint rational intervals `(lo, hi)`, ascending, each holding exactly
/// one real root of the squarefree polynomial `f`, with `hi - lo < width`.
pub(crate) fn isolate_real_roots(f: &IntPoly, width: &BigRational) -> Vec<(BigRational, BigRational)> {
    let seq = sturm_sequence(f);
    let lead = f.leading().expect("nonzero polynomial").abs();
    let maxc = f.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    let bound = BigRational::new(&lead + &maxc, lead) + BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut stack = vec![(-bound.clone(), bound)];
    let mut isolated = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = sign_changes(&seq, &lo) - sign_changes(&seq, &hi);
        match n {
            0 => {}
            1 => isolated.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / &two;
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    let fq: QPoly = f
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let mut out: Vec<(BigRational, BigRational)> = isolated
        .into_iter()
        .map(|(mut lo, mut hi)| {
            // (lo, hi] holds one simple root; a rational root at hi is
            // handled by collapsing onto it
            if eval(&fq, &hi).is_zero() {
                return (hi.clone(), hi);
            }
            let mut slo = eval(&fq, &lo).is_positive();
            if eval(&fq, &lo).is_zero() {
                // the root is interior; nudge lo inside
                let mid = (&lo + &hi) / &two;
                lo = mid;
                slo = eval(&fq, &lo).is_positive();
            }
            while &hi - &lo >= *width {
                let mid = (&lo + &hi) / &two;
                let v = eval(&fq, &mid);
                if v.is_zero() {
                    return (mid.clone(), mid);
                }
                if v.is_positive() == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        })
        .collect();
    out.sort();
    out
}
