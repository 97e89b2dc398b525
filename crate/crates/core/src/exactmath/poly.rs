//! Dense univariate polynomials over the integers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use crate::{Error, Result};

/// Integer polynomial, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * i)
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    if i == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Resultant as the determinant of the Sylvester matrix.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    if m + n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut s = IntMatrix::zeros(size, size);
    for row in 0..n {
        for (k, c) in f.coeffs().iter().rev().enumerate() {
            s.set(row, row + k, c.clone());
        }
    }
    for row in 0..m {
        for (k, c) in g.coeffs().iter().rev().enumerate() {
            s.set(n + row, row + k, c.clone());
        }
    }
    s.determinant()
}

/// `(-1)^{n(n-1)/2} Res(f, f') / lc(f)`.
pub fn poly_discriminant(f: &IntPoly) -> Result<BigInt> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::domain("discriminant needs degree >= 1")),
    };
    if n == 1 {
        return Ok(BigInt::one());
    }
    let r = resultant(f, &f.derivative());
    let lc = f.leading().expect("nonzero");
    let d = r / lc;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic_formula(a: i64, b: i64, c: i64) -> BigInt {
        let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
        BigInt::from(18) * &a * &b * &c - BigInt::from(4) * &a * &a * &a * &c + &a * &a * &b * &b
            - BigInt::from(4) * &b * &b * &b
            - BigInt::from(27) * &c * &c
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(poly_discriminant(&IntPoly::from_i64(&[-1, -1, 0, 1])).unwrap(), BigInt::from(-23));
        assert_eq!(poly_discriminant(&IntPoly::from_i64(&[1, 2, 1, 1])).unwrap(), BigInt::from(-23));
        assert_eq!(poly_discriminant(&IntPoly::from_i64(&[0, 0, 0, 1])).unwrap(), BigInt::zero());
        assert!(poly_discriminant(&IntPoly::from_i64(&[5])).is_err());
        // quadratic: b^2 - 4ac
        assert_eq!(poly_discriminant(&IntPoly::from_i64(&[3, 5, 2])).unwrap(), BigInt::from(1));
    }

    #[test]
    fn resultant_matches_root_product() {
        // Res(x - 2, x^2 + 1) = 2^2 + 1 = 5
        let f = IntPoly::from_i64(&[-2, 1]);
        let g = IntPoly::from_i64(&[1, 0, 1]);
        assert_eq!(resultant(&f, &g), BigInt::from(5));
    }

    #[test]
    fn monic_cubics_agree_with_closed_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let (a, b, c) = (
                rng.gen_range(-100..=100),
                rng.gen_range(-100..=100),
                rng.gen_range(-100..=100),
            );
            let f = IntPoly::from_i64(&[c, b, a, 1]);
            assert_eq!(poly_discriminant(&f).unwrap(), cubic_formula(a, b, c));
        }
    }

    #[test]
    fn display() {
        assert_eq!(IntPoly::from_i64(&[-1, -1, 0, 1]).to_string(), "x^3 - x - 1");
    }
}
