//! Truncated Euler product for the residue of the Dedekind zeta function.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exactmath::arith::primes_up_to;
use crate::exactmath::modp::{factor_mod_p_raw, ModPoly};
use crate::exactmath::Interval;
use crate::numberfield::CubicField;
use crate::{Error, Result};

/// Cutoff at which the tail factor takes its configured value.
pub const REFERENCE_CUTOFF: u64 = 100_000;
pub const DEFAULT_TAIL_FACTOR: f64 = 1.2;

/// Tail factor at `cutoff`: `1 + (t - 1) sqrt(REFERENCE_CUTOFF / cutoff)`.
pub fn tail_factor(tail_at_reference: f64, cutoff: u64) -> f64 {
    1.0 + (tail_at_reference - 1.0) * (REFERENCE_CUTOFF as f64 / cutoff as f64).sqrt()
}

/// Norms `p^f` of the primes above `p`, one entry per prime.
fn prime_norm_degrees(k: &CubicField, p: u64) -> Vec<u32> {
    let disc_mod = (&k.disc % BigInt::from(p)).is_zero();
    if disc_mod {
        factor_mod_p_raw(&k.defining.to_poly(), p)
            .expect("monic cubic is nonzero mod p")
            .iter()
            .map(|(g, _)| g.degree().unwrap() as u32)
            .collect()
    } else {
        match ModPoly::from_int_poly(&k.defining.to_poly(), p).count_roots() {
            3 => vec![1, 1, 1],
            1 => vec![1, 2],
            _ => vec![3],
        }
    }
}

/// `h R = 2 sqrt|d| L / (2^r1 (2 pi)^r2)` with `L` the Euler product of
/// `(1 - 1/p) / prod_P (1 - 1/N P)` over `p <= cutoff`, widened by the
/// factor [`tail_factor`] in both directions.
pub fn analytic_hr_estimate(k: &CubicField, euler_cutoff: u64) -> Result<Interval> {
    analytic_hr_estimate_with(k, euler_cutoff, DEFAULT_TAIL_FACTOR)
}

pub fn analytic_hr_estimate_with(
    k: &CubicField,
    euler_cutoff: u64,
    tail_at_reference: f64,
) -> Result<Interval> {
    if euler_cutoff < 100 {
        return Err(Error::domain(format!(
            "Euler cutoff {euler_cutoff} is below 100"
        )));
    }
    let one = Interval::point(1.0);
    let mut l = one;
    for p in primes_up_to(euler_cutoff) {
        let inv_p = one / Interval::point(p as f64);
        let mut den = one;
        for f in prime_norm_degrees(k, p) {
            let q = Interval::point((p as f64).powi(f as i32));
            den = den * (one - one / q);
        }
        l = l * ((one - inv_p) / den);
    }
    let d = Interval::from_int(&k.disc.abs()).sqrt();
    let two_pi = Interval::pi() * 2.0;
    let mut denom = Interval::point(2f64.powi(k.signature.r1 as i32));
    for _ in 0..k.signature.r2 {
        denom = denom * two_pi;
    }
    let est = d * l * 2.0 / denom;
    let t = Interval::around(tail_factor(tail_at_reference, euler_cutoff), 2);
    Ok(Interval::new((est / t).lo, (est * t).hi))
}
