//! Exhaustive class group computation for fields with a small Minkowski
//! bound: every ideal class is met among the integral ideals of norm at
//! most the bound, and principality is decided by a complete search for
//! generators in a box fixed by a saturated unit lattice.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::search::{combine, flat_reduced, skew_reduced};
use super::units::UnitLattice;
use super::{Certification, ClassGroupResult, Status};
use crate::exactmath::arith::primes_up_to;
use crate::exactmath::{enumerate_short_vectors, Interval};
use crate::numberfield::{
    ideal_inverse, ideal_mul, ideal_norm, minkowski_floor, split_prime, CubicField, Elt, FracIdeal,
};
use crate::{Error, Result};

/// Largest Minkowski bound the oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: u64 = 20;

/// Upper limit on lattice points examined by a single enumeration.
const MAX_POINTS: usize = 4_000_000;

/// Elements of the lattice `basis` with `sum_i w_i d_i |sigma_i|^2 <= bound`,
/// one per sign pair. `basis` should be reduced for the flat form.
fn short_elements(k: &CubicField, basis: &[Elt], weights: &[f64], bound: f64) -> Result<Vec<Elt>> {
    let basis = &skew_reduced(k, basis, weights)?[..];
    let g = k.weighted_gram(basis, weights);
    let det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    // volume of the ellipsoid over the covolume
    let expected = 4.19 * bound.powf(1.5) / det.abs().sqrt();
    if !expected.is_finite() || expected > MAX_POINTS as f64 {
        return Err(Error::domain(format!(
            "oracle search over about {expected:.2e} lattice points is too large"
        )));
    }
    Ok(enumerate_short_vectors(&g, bound)?
        .iter()
        .map(|c| combine(basis, c))
        .collect())
}

/// Elements `x` of the lattice with `d_i log |sigma_i(x)| <= center_i + rho`
/// at every place (and possibly a few more).
fn log_box(k: &CubicField, basis: &[Elt], center: &[f64], rho: f64) -> Result<Vec<Elt>> {
    let weights: Vec<f64> = center
        .iter()
        .enumerate()
        .map(|(i, c)| (-2.0 * (c + rho) / f64::from(k.degree_at(i))).exp())
        .collect();
    short_elements(k, basis, &weights, 3.0 * (1.0 + 1e-9))
}

/// Box radius for centres on the unit grid of the first `r` log coordinates.
fn grid_rho(r: usize) -> f64 {
    0.5 * r as f64 + 0.01
}

/// Centres `base + (c, -sum c)` for integer `c` in the given ranges.
fn grid(base: &[f64], ranges: &[(i64, i64)]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| (lo..=hi).map(move |c| [p.clone(), vec![c]].concat()))
            .collect();
    }
    out.into_iter()
        .map(|c| {
            let mut v: Vec<f64> = c.iter().zip(base).map(|(ci, b)| b + *ci as f64).collect();
            v.push(base[c.len()] - c.iter().sum::<i64>() as f64);
            v
        })
        .collect()
}

/// Box centres covering `l_0 + P`, where `l_0 = (d_i log n / 3)` and `P`
/// is the fundamental parallelepiped of the unit lattice.
fn cover(k: &CubicField, units: &UnitLattice, log_n: f64) -> Vec<Vec<f64>> {
    let r = k.signature.unit_rank();
    let base: Vec<f64> = (0..=r)
        .map(|i| f64::from(k.degree_at(i)) * log_n / 3.0)
        .collect();
    let mut radii = vec![0.0; r];
    for b in units.basis() {
        for (i, x) in b.iter().enumerate() {
            radii[i] += 0.5 * x.abs().hi;
        }
    }
    let ranges: Vec<(i64, i64)> = radii
        .iter()
        .map(|v| ((-v).floor() as i64, v.ceil() as i64))
        .collect();
    grid(&base, &ranges)
}

/// Furthest grid shell searched for a first system of units.
const MAX_UNIT_SHELL: i64 = 400;

/// A saturated basis of the unit group modulo torsion.
///
/// Units are first found by scanning boxes of growing distance in log
/// space. Once some full rank set is known, every unit outside the lattice
/// it spans has a translate in the fundamental parallelepiped, so searching
/// that region until nothing new appears saturates the lattice.
fn unit_lattice(k: &CubicField) -> Result<UnitLattice> {
    let r = k.signature.unit_rank();
    let order = [k.one(), k.alpha(), k.mul(&k.alpha(), &k.alpha())];
    let rho = grid_rho(r);
    let zero = vec![0.0; r + 1];
    let mut units = UnitLattice::new(r);
    let absorb = |units: &mut UnitLattice, centres: Vec<Vec<f64>>| -> Result<bool> {
        let mut grew = false;
        for c in centres {
            for x in log_box(k, &order, &c, rho)? {
                if k.norm(&x).abs().is_one() {
                    grew |= units.add(&k.log_embedding(&x));
                }
            }
        }
        Ok(grew)
    };
    let mut shell = 0;
    while !units.is_full() {
        if shell > MAX_UNIT_SHELL {
            return Err(Error::domain("oracle found no system of fundamental units"));
        }
        let centres: Vec<Vec<f64>> = grid(&zero, &vec![(-shell, shell); r])
            .into_iter()
            .filter(|c| c[..r].iter().any(|x| x.abs() as i64 == shell))
            .collect();
        absorb(&mut units, centres)?;
        shell += 1;
    }
    loop {
        let centres = cover(k, &units, 0.0);
        if !absorb(&mut units, centres)? {
            return Ok(units);
        }
    }
}

struct Oracle<'a> {
    k: &'a CubicField,
    units: UnitLattice,
}

impl Oracle<'_> {
    fn is_principal(&self, i: &FracIdeal) -> Result<bool> {
        if !i.is_integral() {
            return Err(Error::domain("principality test needs an integral ideal"));
        }
        let n = ideal_norm(i).to_integer();
        let log_n = n.to_f64().unwrap_or(f64::INFINITY).ln();
        let basis = flat_reduced(&i.basis())?;
        let rho = grid_rho(self.k.signature.unit_rank());
        for c in cover(self.k, &self.units, log_n) {
            if log_box(self.k, &basis, &c, rho)?
                .iter()
                .any(|x| self.k.norm(x).abs() == n)
            {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `i` and `j` in the same class, both integral.
    fn equivalent(&self, i: &FracIdeal, j: &FracIdeal) -> Result<bool> {
        let nj = ideal_norm(j).to_integer();
        let inv = ideal_inverse(self.k, j)?;
        let scaled = ideal_mul(
            self.k,
            &inv,
            &FracIdeal::principal(self.k, &[nj, BigInt::from(0), BigInt::from(0)])?,
        );
        self.is_principal(&ideal_mul(self.k, i, &scaled))
    }

    fn order_of(&self, i: &FracIdeal, h: u64) -> Result<u64> {
        let mut p = i.clone();
        for n in 1..=h {
            if self.is_principal(&p)? {
                return Ok(n);
            }
            p = ideal_mul(self.k, &p, i);
        }
        Err(Error::domain("class order exceeds the class number"))
    }
}

/// Integral ideals of norm at most `m`.
fn small_ideals(k: &CubicField, m: u64) -> Result<Vec<FracIdeal>> {
    let mut primes = Vec::new();
    for p in primes_up_to(m) {
        for q in split_prime(k, p)? {
            if let Some(n) = q.norm().to_u64().filter(|&n| n <= m) {
                primes.push((n, q.hnf));
            }
        }
    }
    let mut out = vec![FracIdeal::unit()];
    let mut stack = vec![(FracIdeal::unit(), 1u64, 0usize)];
    while let Some((ideal, norm, from)) = stack.pop() {
        for (idx, (n, q)) in primes.iter().enumerate().skip(from) {
            if norm * n <= m {
                let next = ideal_mul(k, &ideal, q);
                out.push(next.clone());
                stack.push((next, norm * n, idx));
            }
        }
    }
    Ok(out)
}

/// Invariant factors from the element orders of a finite abelian group.
fn divisors_from_orders(orders: &[u64]) -> Vec<u64> {
    let h = orders.len() as u64;
    let mut levels: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    let mut rest = h;
    let mut p = 2;
    while rest > 1 {
        if rest.is_multiple_of(p) {
            let mut counts = Vec::new();
            let mut q = 1u64;
            let mut prev = 1u64;
            while rest.is_multiple_of(p) {
                rest /= p;
                q *= p;
                let c = orders.iter().filter(|&&o| q.is_multiple_of(o)).count() as u64;
                counts.push((c / prev).ilog(p));
                prev = c;
            }
            levels.insert(p, counts);
        }
        p += 1;
    }
    let cyclic = levels.values().flat_map(|c| c.first().copied()).max().unwrap_or(0);
    let mut out: Vec<u64> = (1..=cyclic)
        .map(|j| {
            levels
                .iter()
                .map(|(p, c)| p.pow(c.iter().filter(|&&x| x >= j).count() as u32))
                .product()
        })
        .collect();
    out.reverse();
    out
}

/// Exhaustive class group, for Minkowski bounds up to
/// [`DEFAULT_ORACLE_CAP`].
pub fn class_group_oracle(k: &CubicField) -> Result<ClassGroupResult> {
    class_group_oracle_with_cap(k, DEFAULT_ORACLE_CAP)
}

pub fn class_group_oracle_with_cap(k: &CubicField, cap: u64) -> Result<ClassGroupResult> {
    let m = minkowski_floor(k);
    if m > cap {
        return Err(Error::domain(format!(
            "Minkowski bound {m} exceeds the oracle cap {cap}"
        )));
    }
    let oracle = Oracle {
        k,
        units: unit_lattice(k)?,
    };
    let mut reps: Vec<FracIdeal> = Vec::new();
    for i in small_ideals(k, m)? {
        let mut seen = false;
        for r in &reps {
            if oracle.equivalent(&i, r)? {
                seen = true;
                break;
            }
        }
        if !seen {
            reps.push(i);
        }
    }
    let h = reps.len() as u64;
    let orders = reps
        .iter()
        .map(|r| oracle.order_of(r, h))
        .collect::<Result<Vec<u64>>>()?;
    let divisors = divisors_from_orders(&orders);
    let regulator = oracle.units.regulator().expect("saturated unit lattice");
    let cert = Certification {
        status: Status::Oracle,
        analytic_ratio: Interval::ENTIRE,
        euler_cutoff: 0,
        tail_factor: 1.0,
        relation_budget: 0,
        candidates_tested: 0,
        relations: 0,
        precision: k.precision,
    };
    let res = ClassGroupResult::from_divisors(divisors, regulator, cert);
    debug_assert_eq!(res.h, h);
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_from_orders() {
        // Z/2 x Z/4
        assert_eq!(divisors_from_orders(&[1, 2, 2, 2, 4, 4, 4, 4]), vec![2, 4]);
        // Z/6
        assert_eq!(divisors_from_orders(&[1, 2, 3, 3, 6, 6]), vec![6]);
        // Z/3 x Z/3
        assert_eq!(divisors_from_orders(&[1, 3, 3, 3, 3, 3, 3, 3, 3]), vec![3, 3]);
        assert_eq!(divisors_from_orders(&[1]), Vec::<u64>::new());
    }
}
