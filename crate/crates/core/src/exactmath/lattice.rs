//! Lattice reduction (LLL, delta = 3/4) and Fincke-Pohst enumeration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::IntMatrix;
use crate::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn round_rat(q: &BigRational) -> BigInt {
    (q + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer()
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct GramSchmidt {
    mu: Vec<Vec<BigRational>>,
    norms: Vec<BigRational>,
}

fn gram_schmidt(b: &[Vec<BigRational>]) -> GramSchmidt {
    let n = b.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            if norms[j] == BigRational::zero() {
                continue;
            }
            let m = dot(&b[i], &star[j]) / &norms[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= &m * sk;
            }
            mu[i][j] = m;
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    GramSchmidt { mu, norms }
}

/// LLL-reduces the rows of `basis` over exact rationals with delta = 3/4.
///
/// Fails with a domain error when the rows are linearly dependent.
pub fn lll_reduce(basis: &IntMatrix) -> Result<IntMatrix> {
    let n = basis.rows();
    let mut b: Vec<Vec<BigRational>> = basis
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let mut gs = gram_schmidt(&b);
    if gs.norms.iter().any(|x| x.is_zero()) {
        return Err(Error::domain("LLL input rows are linearly dependent"));
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1;
    while k < n {
        size_reduce(&mut b, &mut gs, k, k - 1);
        let lhs = gs.norms[k].clone();
        let m = &gs.mu[k][k - 1];
        let rhs = (&delta - m * m) * &gs.norms[k - 1];
        if lhs < rhs {
            b.swap(k, k - 1);
            gs = gram_schmidt(&b);
            k = (k - 1).max(1);
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                size_reduce(&mut b, &mut gs, k, l);
            }
            k += 1;
        }
    }
    Ok(IntMatrix::from_rows(
        b.into_iter()
            .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
            .collect(),
    ))
}

fn size_reduce(b: &mut [Vec<BigRational>], gs: &mut GramSchmidt, k: usize, l: usize) {
    let q = round_rat(&gs.mu[k][l]);
    if q.is_zero() {
        return;
    }
    let qr = BigRational::from_integer(q);
    let bl = b[l].clone();
    for (x, y) in b[k].iter_mut().zip(&bl) {
        *x -= &qr * y;
    }
    for j in 0..l {
        let v = &qr * &gs.mu[l][j];
        gs.mu[k][j] -= v;
    }
    gs.mu[k][l] -= qr;
}

fn gram_apply(g0: &[Vec<f64>], t: &[Vec<i64>]) -> Vec<Vec<f64>> {
    let n = g0.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                if t[i][a] == 0 {
                    continue;
                }
                for c in 0..n {
                    s += t[i][a] as f64 * g0[a][c] * t[j][c] as f64;
                }
            }
            out[i][j] = s;
        }
    }
    out
}

fn gs_from_gram(g: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * b[k];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i];
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * b[k];
        }
        b[i] = s;
    }
    (mu, b)
}

/// Floating-point LLL on a Gram matrix.
///
/// Returns the integer transform `T` whose rows express the reduced basis in
/// the input basis, so the reduced Gram matrix is `T G T^t`.
pub fn lll_reduce_gram(gram: &[Vec<f64>]) -> Result<Vec<Vec<i64>>> {
    let n = gram.len();
    let mut t: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let (_, b) = gs_from_gram(gram);
    if b.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::domain("Gram matrix is not positive definite"));
    }
    let mut k = 1;
    let mut guard = 0;
    while k < n {
        guard += 1;
        if guard > 100_000 {
            break;
        }
        let g = gram_apply(gram, &t);
        let (mu, _) = gs_from_gram(&g);
        let q = mu[k][k - 1].round();
        if q != 0.0 {
            let q = q as i64;
            let row = t[k - 1].clone();
            for (x, y) in t[k].iter_mut().zip(row) {
                *x -= q * y;
            }
        }
        let g = gram_apply(gram, &t);
        let (mu, b) = gs_from_gram(&g);
        if b[k] < (0.75 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            t.swap(k, k - 1);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                let g = gram_apply(gram, &t);
                let (mu, _) = gs_from_gram(&g);
                let q = mu[k][l].round();
                if q != 0.0 {
                    let q = q as i64;
                    let row = t[l].clone();
                    for (x, y) in t[k].iter_mut().zip(row) {
                        *x -= q * y;
                    }
                }
            }
            k += 1;
        }
    }
    Ok(t)
}

fn quad_form(g: &[Vec<f64>], x: &[i64]) -> f64 {
    let n = g.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += g[i][j] * x[i] as f64 * x[j] as f64;
        }
    }
    s
}

fn fincke_pohst_raw(g: &[Vec<f64>], bound: f64) -> Result<Vec<Vec<i64>>> {
    let n = g.len();
    // q[i][i] diagonal weights, q[i][j] (j > i) the Cholesky ratios
    let mut q: Vec<Vec<f64>> = g.to_vec();
    for i in 0..n {
        if !(q[i][i] > 0.0) {
            return Err(Error::domain("Gram matrix is not positive definite"));
        }
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    fn rec(i: usize, partial: f64, bound: f64, q: &[Vec<f64>], x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = q.len();
        let c: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
        let rem = bound - partial;
        if rem < 0.0 {
            return;
        }
        let w = (rem / q[i][i]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for v in lo..=hi {
            x[i] = v;
            let d = v as f64 - c;
            let p = partial + q[i][i] * d * d;
            if p > bound {
                continue;
            }
            if i == 0 {
                out.push(x.clone());
            } else {
                rec(i - 1, p, bound, q, x, out);
            }
        }
        x[i] = 0;
    }
    if n == 0 {
        return Ok(out);
    }
    rec(n - 1, 0.0, bound, &q, &mut x, &mut out);
    Ok(out)
}

fn positive_representative(v: &[i64]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// All nonzero integer vectors `v` with `v^t G v <= bound`, one per `+-v`
/// pair (first nonzero coordinate positive), for a floating Gram matrix.
///
/// The search radius carries a relative slack of `1e-9`, so vectors on the
/// boundary are never lost to rounding; callers needing an exact cut filter
/// the output themselves.
pub fn enumerate_short_vectors(gram: &[Vec<f64>], bound: f64) -> Result<Vec<Vec<i64>>> {
    let n = gram.len();
    let t = lll_reduce_gram(gram)?;
    let g = gram_apply(gram, &t);
    let slack = bound * (1.0 + 1e-9) + 1e-9;
    let ys = fincke_pohst_raw(&g, slack)?;
    let mut out: Vec<Vec<i64>> = ys
        .into_iter()
        .map(|y| {
            (0..n)
                .map(|j| (0..n).map(|i| y[i] * t[i][j]).sum())
                .collect::<Vec<i64>>()
        })
        .filter(|x: &Vec<i64>| positive_representative(x))
        .filter(|x| quad_form(gram, x) <= slack)
        .collect();
    out.sort();
    Ok(out)
}

/// Exact variant for rational Gram matrices: positive definiteness is
/// decided by leading principal minors and the bound is applied exactly.
pub fn enumerate_short_vectors_exact(
    gram: &[Vec<BigRational>],
    bound: &BigRational,
) -> Result<Vec<Vec<i64>>> {
    let n = gram.len();
    for k in 1..=n {
        let minor: Vec<Vec<BigRational>> = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
        if rational_det(minor) <= BigRational::zero() {
            return Err(Error::domain("Gram matrix is not positive definite"));
        }
    }
    let g: Vec<Vec<f64>> = gram
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect();
    let b = bound.to_f64().unwrap_or(f64::INFINITY);
    if bound < &BigRational::zero() {
        return Ok(Vec::new());
    }
    let cands = enumerate_short_vectors(&g, b * (1.0 + 1e-6) + 1e-6)?;
    Ok(cands
        .into_iter()
        .filter(|x| {
            let mut s = BigRational::zero();
            for i in 0..n {
                for j in 0..n {
                    s += &gram[i][j] * rat(x[i] * x[j]);
                }
            }
            &s <= bound
        })
        .collect())
}

fn rational_det(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for i in c + 1..n {
            let f = &a[i][c] / &piv;
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = &f * &a[c][j];
                a[i][j] -= v;
            }
        }
    }
    det
}

/// Smallest absolute row entry, used by tests to spot unit vectors.
pub fn min_row_norm_sq(m: &IntMatrix) -> BigInt {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x * x).sum::<BigInt>())
        .min()
        .unwrap_or_default()
        .abs()
}
