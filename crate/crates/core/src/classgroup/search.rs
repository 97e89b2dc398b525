//! Relation search: fb-smooth elements from expanding coordinate boxes.
//!
//! Candidates come from LLL-reduced bases (under `T2`, later under randomly
//! skewed versions of it) of the order, of each factor-base prime, and of
//! seeded random products of factor-base primes.
//! Box `j` of a lattice covers the coordinates with sup-norm in
//! `(2^(j-1), 2^j]`; only one of each `+-` pair is tried.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exactmath::{lll_reduce, lll_reduce_gram, IntMatrix, Interval};
use crate::numberfield::{ideal_mul, ideal_pow, CubicField, Elt, FracIdeal, PrimeIdeal};
use crate::Result;

/// A factor-base-smooth element with its factorization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Relation {
    #[serde(with = "crate::exactmath::intstr::vec")]
    pub element: Vec<BigInt>,
    pub exponents: Vec<u32>,
    pub log_embedding: Vec<Interval>,
}

impl Relation {
    pub fn elt(&self) -> Elt {
        [
            self.element[0].clone(),
            self.element[1].clone(),
            self.element[2].clone(),
        ]
    }

    /// Re-verifies `(theta) = prod P_i^e_i` by ideal arithmetic.
    pub fn verify(&self, k: &CubicField, fb: &[PrimeIdeal]) -> bool {
        let Ok(lhs) = FracIdeal::principal(k, &self.elt()) else {
            return false;
        };
        let mut rhs = FracIdeal::unit();
        for (p, &e) in fb.iter().zip(&self.exponents) {
            if e > 0 {
                let Ok(pe) = ideal_pow(k, &p.hnf, i64::from(e)) else {
                    return false;
                };
                rhs = ideal_mul(k, &rhs, &pe);
            }
        }
        lhs == rhs
    }
}

/// Largest box index searched in the order itself when the factor base is
/// nonempty; beyond it, units come from dependent relations.
const ORDER_STAGES: u32 = 4;
/// Growth per cycle of the log-weight range used to skew `T2`.
const SKEW_PER_CYCLE: f64 = 4.0;
const MAX_SKEW: f64 = 60.0;
/// Random factor-base primes multiplied onto each prime per cycle.
const RANDOM_FACTORS: usize = 2;

pub(crate) struct RelationSearch<'a> {
    k: &'a CubicField,
    fb: &'a [PrimeIdeal],
    /// Rational primes under the factor base, with the indices above each.
    under: Vec<(u64, Vec<usize>)>,
    queue: VecDeque<Elt>,
    cycle: u32,
    prime_cursor: usize,
    order_done: bool,
    rng: ChaCha8Rng,
    pub tested: u64,
}

fn seed_for(seed: u64, disc: &BigInt) -> u64 {
    // FNV-1a over the decimal discriminant
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in disc.to_string().bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed
}

/// Coordinates with sup-norm exactly `s`, first nonzero entry positive.
fn shell(s: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for x in -s..=s {
        for y in -s..=s {
            for z in -s..=s {
                let c = [x, y, z];
                if c.iter().map(|v| v.abs()).max() != Some(s) {
                    continue;
                }
                if c.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0) {
                    out.push(c);
                }
            }
        }
    }
    out
}

pub(super) fn combine(basis: &[Elt], c: &[i64]) -> Elt {
    let mut e: Elt = Default::default();
    for (ci, b) in c.iter().zip(basis) {
        if *ci != 0 {
            for i in 0..3 {
                e[i] += &b[i] * *ci;
            }
        }
    }
    e
}

/// Exact LLL reduction of the coefficient vectors.
pub(super) fn flat_reduced(basis: &[Elt]) -> Result<Vec<Elt>> {
    let m = lll_reduce(&IntMatrix::from_rows(basis.iter().map(|b| b.to_vec()).collect()))?;
    Ok((0..3)
        .map(|i| [m.get(i, 0).clone(), m.get(i, 1).clone(), m.get(i, 2).clone()])
        .collect())
}

/// LLL basis for `sum_i w_i d_i |sigma_i|^2`, reached from a flat-reduced
/// basis in steps so that every floating Gram matrix stays well
/// conditioned.
pub(super) fn skew_reduced(k: &CubicField, basis: &[Elt], weights: &[f64]) -> Result<Vec<Elt>> {
    let skew = weights.iter().map(|w| w.ln().abs()).fold(0.0, f64::max);
    let steps = (skew / 4.0).ceil().max(1.0) as i32;
    let mut basis = basis.to_vec();
    for t in 1..=steps {
        let w: Vec<f64> = weights.iter().map(|w| w.powf(f64::from(t) / f64::from(steps))).collect();
        let tr = lll_reduce_gram(&k.weighted_gram(&basis, &w))?;
        basis = tr.iter().map(|row| combine(&basis, row)).collect();
    }
    Ok(basis)
}

impl<'a> RelationSearch<'a> {
    pub fn new(k: &'a CubicField, fb: &'a [PrimeIdeal], seed: u64) -> Self {
        let mut under: Vec<(u64, Vec<usize>)> = Vec::new();
        for (i, p) in fb.iter().enumerate() {
            match under.last_mut() {
                Some((q, idx)) if *q == p.p => idx.push(i),
                _ => under.push((p.p, vec![i])),
            }
        }
        Self {
            k,
            fb,
            under,
            queue: VecDeque::new(),
            cycle: 0,
            prime_cursor: 0,
            order_done: false,
            rng: ChaCha8Rng::seed_from_u64(seed_for(seed, &k.disc)),
            tested: 0,
        }
    }

    fn reduced_basis(&self, ideal: &FracIdeal) -> Vec<Elt> {
        let basis = ideal.basis();
        let gram = self.k.t2_gram(&basis);
        match lll_reduce_gram(&gram) {
            Ok(t) => t
                .iter()
                .map(|row| {
                    let mut e: Elt = Default::default();
                    for (c, b) in row.iter().zip(&basis) {
                        for i in 0..3 {
                            e[i] += b[i].clone() * *c;
                        }
                    }
                    e
                })
                .collect(),
            Err(_) => basis,
        }
    }

    /// Reduced basis under a random skew of `T2` whose log weights grow
    /// with the cycle; associates found under different skews yield units.
    fn skewed_basis(&mut self, ideal: &FracIdeal) -> Vec<Elt> {
        let Ok(flat) = flat_reduced(&ideal.basis()) else {
            return self.reduced_basis(ideal);
        };
        let span = (SKEW_PER_CYCLE * f64::from(self.cycle)).min(MAX_SKEW);
        let places = self.k.signature.places();
        let t: Vec<f64> = (0..places).map(|_| self.rng.gen_range(-span..=span)).collect();
        let mean = t
            .iter()
            .enumerate()
            .map(|(i, x)| f64::from(self.k.degree_at(i)) * x)
            .sum::<f64>()
            / 3.0;
        let weights: Vec<f64> = t.iter().map(|x| (x - mean).exp()).collect();
        skew_reduced(self.k, &flat, &weights).unwrap_or(flat)
    }

    /// Queues the shells `smin..=smax` of the lattice spanned by `basis`.
    fn push_shells(&mut self, basis: &[Elt], smin: i64, smax: i64) {
        for s in smin..=smax {
            for c in shell(s) {
                let mut e: Elt = Default::default();
                for (ci, b) in c.iter().zip(basis) {
                    if *ci != 0 {
                        for i in 0..3 {
                            e[i] += &b[i] * *ci;
                        }
                    }
                }
                self.queue.push_back(e);
            }
        }
    }

    /// Queues the next batch of candidates.
    fn refill(&mut self) {
        loop {
            if !self.order_done {
                self.order_done = true;
                if self.fb.is_empty() || self.cycle <= ORDER_STAGES {
                    let basis = self.reduced_basis(&FracIdeal::unit());
                    let hi = 1i64 << self.cycle;
                    self.push_shells(&basis, hi / 2 + 1, hi);
                    return;
                }
                let basis = self.skewed_basis(&FracIdeal::unit());
                self.push_shells(&basis, 1, 2);
                return;
            }
            if self.prime_cursor < self.fb.len() {
                let i = self.prime_cursor;
                self.prime_cursor += 1;
                let mut ideal = self.fb[i].hnf.clone();
                let smax = if self.cycle == 0 {
                    2
                } else {
                    for _ in 0..RANDOM_FACTORS {
                        let j = self.rng.gen_range(0..self.fb.len());
                        ideal = ideal_mul(self.k, &ideal, &self.fb[j].hnf);
                    }
                    1
                };
                let basis = if self.cycle == 0 {
                    self.reduced_basis(&ideal)
                } else {
                    self.skewed_basis(&ideal)
                };
                self.push_shells(&basis, 1, smax);
                return;
            }
            self.cycle += 1;
            self.prime_cursor = 0;
            self.order_done = false;
        }
    }

    /// Exponent vector of `x` if `(x)` factors over the factor base.
    pub fn factor(&self, x: &Elt) -> Option<Vec<u32>> {
        let n = self.k.norm(x);
        if n.is_zero() {
            return None;
        }
        let mut exps = vec![0u32; self.fb.len()];
        let mut n = n.magnitude().clone();
        let small = n.to_u128();
        let mut rest_small = small;
        for (p, idx) in &self.under {
            let mut vp = 0u32;
            match rest_small.as_mut() {
                Some(r) => {
                    while *r % u128::from(*p) == 0 {
                        *r /= u128::from(*p);
                        vp += 1;
                    }
                }
                None => {
                    let pb = num_bigint::BigUint::from(*p);
                    while (&n % &pb).is_zero() {
                        n /= &pb;
                        vp += 1;
                    }
                }
            }
            if vp == 0 {
                continue;
            }
            let mut seen = 0u32;
            for &i in idx {
                let v = self.fb[i].valuation(self.k, x).ok()?;
                exps[i] = v;
                seen += v * self.fb[i].residue_degree;
            }
            if seen != vp {
                return None;
            }
        }
        let smooth = match rest_small {
            Some(r) => r == 1,
            None => n == num_bigint::BigUint::from(1u32),
        };
        smooth.then_some(exps)
    }

    /// Next relation, or `None` once `budget` candidates have been tested.
    pub fn next_relation(&mut self, budget: u64) -> Option<Relation> {
        while self.tested < budget {
            let Some(x) = self.queue.pop_front() else {
                self.refill();
                continue;
            };
            self.tested += 1;
            if let Some(exponents) = self.factor(&x) {
                let log_embedding = self.k.log_embedding(&x);
                return Some(Relation {
                    element: x.to_vec(),
                    exponents,
                    log_embedding,
                });
            }
        }
        None
    }
}
