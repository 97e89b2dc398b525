//! Class groups, regulators and 2-ranks of cubic fields.
//!
//! [`class_group`] collects factor-base relations, reads the group off the
//! Hermite basis of the relation lattice and the regulator off the units
//! that dependent relations produce, then certifies `h R` against the
//! analytic class number formula. [`class_group_oracle`] is an independent
//! exhaustive computation for small Minkowski bounds.

mod analytic;
mod oracle;
mod relmat;
mod search;
mod units;

pub use analytic::{
    analytic_hr_estimate, analytic_hr_estimate_with, tail_factor, DEFAULT_TAIL_FACTOR,
    REFERENCE_CUTOFF,
};
pub use oracle::{class_group_oracle, class_group_oracle_with_cap, DEFAULT_ORACLE_CAP};
pub use search::Relation;

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::exactmath::arith::{factor_integer, primes_up_to, DEFAULT_RHO_EFFORT};
use crate::exactmath::matrix::snf_diagonal;
use crate::exactmath::Interval;
use crate::numberfield::{make_field, minkowski_floor, split_prime, CubicField, PrimeIdeal};
use crate::{Error, Result};
use relmat::{Insertion, RelationLattice};
use search::RelationSearch;
use units::UnitLattice;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Exhaustive computation.
    Oracle,
    /// `h R` agrees with the analytic estimate within a factor `sqrt 2`.
    Certified,
    /// Budget or precision ran out before certification.
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub status: Status,
    /// `h R` over the analytic estimate.
    pub analytic_ratio: Interval,
    pub euler_cutoff: u64,
    pub tail_factor: f64,
    pub relation_budget: u64,
    pub candidates_tested: u64,
    pub relations: usize,
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassGroupResult {
    /// Invariant factors greater than 1, each dividing the next.
    pub elementary_divisors: Vec<u64>,
    pub h: u64,
    pub two_rank: u32,
    /// `|Cl[2]| = 2^two_rank`.
    pub cl2_size: u64,
    pub regulator: Interval,
    pub certification: Certification,
}

impl ClassGroupResult {
    fn from_divisors(divisors: Vec<u64>, regulator: Interval, certification: Certification) -> Self {
        let two_rank = two_rank_of(&divisors);
        Self {
            h: divisors.iter().product(),
            cl2_size: 1 << two_rank,
            two_rank,
            elementary_divisors: divisors,
            regulator,
            certification,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassGroupConfig {
    pub precision: u32,
    pub max_precision: u32,
    pub euler_cutoff: u64,
    /// Tail factor at the reference cutoff.
    pub tail_factor: f64,
    /// Candidate elements tested per precision level.
    pub relation_budget: u64,
    pub seed: u64,
    /// Turn budget exhaustion into errors instead of heuristic results.
    pub strict: bool,
}

/// Environment variable overriding the starting precision.
pub const PRECISION_ENV: &str = "CUBICLAB_PRECISION_BITS";

impl Default for ClassGroupConfig {
    fn default() -> Self {
        Self {
            precision: crate::numberfield::DEFAULT_PRECISION,
            max_precision: 512,
            euler_cutoff: REFERENCE_CUTOFF,
            tail_factor: DEFAULT_TAIL_FACTOR,
            relation_budget: 400_000,
            seed: 0,
            strict: false,
        }
    }
}

impl ClassGroupConfig {
    /// Defaults, with the starting precision taken from
    /// `CUBICLAB_PRECISION_BITS` when set.
    pub fn from_env() -> Result<Self> {
        let mut c = Self::default();
        if let Ok(v) = std::env::var(PRECISION_ENV) {
            c.precision = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{PRECISION_ENV}={v:?} is not a bit count")))?;
            c.max_precision = c.max_precision.max(c.precision);
        }
        Ok(c)
    }
}

/// Number of even invariant factors.
pub fn two_rank_of(divisors: &[u64]) -> u32 {
    divisors.iter().filter(|d| *d % 2 == 0).count() as u32
}

/// All prime ideals of norm at most the Minkowski bound, ordered by
/// rational prime.
pub fn factor_base(k: &CubicField) -> Result<Vec<PrimeIdeal>> {
    let m = minkowski_floor(k);
    let mut fb = Vec::new();
    for p in primes_up_to(m) {
        for q in split_prime(k, p)? {
            if q.norm() <= BigInt::from(m) {
                fb.push(q);
            }
        }
    }
    Ok(fb)
}

/// Searches relations until the relation lattice has full rank.
pub fn collect_relations(
    k: &CubicField,
    fb: &[PrimeIdeal],
    budget: u64,
    seed: u64,
) -> Result<Vec<Relation>> {
    let mut search = RelationSearch::new(k, fb, seed);
    let mut lat = RelationLattice::new(fb.len(), k.signature.places());
    let mut out = Vec::new();
    while !lat.is_full() {
        let Some(rel) = search.next_relation(budget) else {
            return Err(Error::InsufficientRelations {
                rank: lat.rank(),
                needed: fb.len(),
                tested: search.tested,
            });
        };
        lat.insert(exponent_vector(&rel), rel.log_embedding.clone());
        out.push(rel);
    }
    Ok(out)
}

fn exponent_vector(rel: &Relation) -> Vec<BigInt> {
    rel.exponents.iter().map(|&e| BigInt::from(e)).collect()
}

/// Invariant factors (> 1) of the cokernel of the relation lattice.
fn cokernel_divisors(lat: &RelationLattice) -> Vec<u64> {
    let det = lat.determinant();
    if det.is_one() {
        return Vec::new();
    }
    let squarefree = factor_integer(&det, DEFAULT_RHO_EFFORT)
        .map(|f| f.iter().all(|(_, e)| *e == 1))
        .unwrap_or(false);
    if squarefree {
        return vec![det.to_u64().expect("class number fits in u64")];
    }
    snf_diagonal(&lat.matrix())
        .into_iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_u64().expect("class number fits in u64"))
        .collect()
}

fn strictly_certified(ratio: &Interval) -> bool {
    ratio.strictly_inside(FRAC_1_SQRT_2.next_up(), SQRT_2.next_down())
}

const MAX_SEEN_VECTORS: usize = 100_000;

struct Attempt {
    result: ClassGroupResult,
    /// Tighter enclosures might still certify.
    precision_limited: bool,
}

fn attempt(k: &CubicField, config: &ClassGroupConfig, est: Interval) -> Result<Attempt> {
    let fb = factor_base(k)?;
    let r = k.signature.unit_rank();
    let mut search = RelationSearch::new(k, &fb, config.seed);
    let mut lat = RelationLattice::new(fb.len(), k.signature.places());
    let mut units = UnitLattice::new(r);
    let mut relations = 0usize;
    let mut ratio = Interval::ENTIRE;
    let cert = |status, ratio, tested, relations| Certification {
        status,
        analytic_ratio: ratio,
        euler_cutoff: config.euler_cutoff,
        tail_factor: tail_factor(config.tail_factor, config.euler_cutoff),
        relation_budget: config.relation_budget,
        candidates_tested: tested,
        relations,
        precision: k.precision,
    };
    let mut seen: HashMap<Vec<(usize, u32)>, Vec<Interval>> = HashMap::new();
    while let Some(rel) = search.next_relation(config.relation_budget) {
        relations += 1;
        // a repeated exponent vector gives a unit with a tight log directly
        let key: Vec<(usize, u32)> = rel
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| (i, *e))
            .collect();
        let mut changed = match seen.get(&key) {
            Some(first) => {
                let log: Vec<Interval> =
                    rel.log_embedding.iter().zip(first).map(|(x, y)| *x - *y).collect();
                units.add(&log)
            }
            None => {
                if seen.len() < MAX_SEEN_VECTORS {
                    seen.insert(key, rel.log_embedding.clone());
                }
                false
            }
        };
        changed |= match lat.insert(exponent_vector(&rel), rel.log_embedding) {
            Insertion::Grew => true,
            Insertion::Unit(log) => units.add(&log),
        };
        if !changed || !lat.is_full() {
            continue;
        }
        let Some(reg) = units.regulator() else { continue };
        let h = Interval::from_int(&lat.determinant());
        ratio = h * reg / est;
        if strictly_certified(&ratio) {
            let c = cert(Status::Certified, ratio, search.tested, relations);
            return Ok(Attempt {
                result: ClassGroupResult::from_divisors(cokernel_divisors(&lat), reg, c),
                precision_limited: false,
            });
        }
    }
    if !lat.is_full() {
        return Err(Error::InsufficientRelations {
            rank: lat.rank(),
            needed: fb.len(),
            tested: search.tested,
        });
    }
    if config.strict && !units.is_full() {
        return Err(Error::RegulatorRankDeficient {
            found: units.len(),
            needed: r,
        });
    }
    let reg = units.regulator().unwrap_or(Interval::new(0.0, f64::INFINITY));
    let precision_limited =
        units.is_full() && (!ratio.is_finite() || ratio.width() > 0.05 * ratio.mid().abs());
    let c = cert(Status::Heuristic, ratio, search.tested, relations);
    Ok(Attempt {
        result: ClassGroupResult::from_divisors(cokernel_divisors(&lat), reg, c),
        precision_limited,
    })
}

/// Class group with `h R` certification, doubling the precision on
/// failure up to `config.max_precision`.
pub fn class_group(k: &CubicField, config: &ClassGroupConfig) -> Result<ClassGroupResult> {
    let est = analytic_hr_estimate_with(k, config.euler_cutoff, config.tail_factor)?;
    let mut prec = config.precision.max(2);
    loop {
        let field = if prec == k.precision {
            k.clone()
        } else {
            make_field(&k.defining, prec)?
        };
        let a = attempt(&field, config, est)?;
        if a.result.certification.status == Status::Certified {
            return Ok(a.result);
        }
        if !a.precision_limited || prec.saturating_mul(2) > config.max_precision {
            if config.strict {
                return Err(Error::CertificationFailed(prec));
            }
            return Ok(a.result);
        }
        prec *= 2;
    }
}

/// `gcd`-closed check used by tests and the reference reader.
pub fn is_divisibility_chain(divisors: &[u64]) -> bool {
    divisors.iter().all(|&d| d > 1) && divisors.windows(2).all(|w| w[1] % w[0] == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubicforms::MonicCubic;

    fn field(a: i64, b: i64, c: i64) -> CubicField {
        make_field(&MonicCubic::new(a, b, c), 128).unwrap()
    }

    #[test]
    fn small_fields_certify() {
        for (f, h) in [((0, -1, -1), 1), ((0, 4, -1), 2), ((0, -3, 1), 1), ((0, 1, -1), 1)] {
            let k = field(f.0, f.1, f.2);
            let r = class_group(&k, &ClassGroupConfig::default()).unwrap();
            assert_eq!(r.certification.status, Status::Certified, "{:?}", r);
            assert_eq!(r.h, h, "{f:?}");
            let o = class_group_oracle(&k).unwrap();
            assert_eq!(o.elementary_divisors, r.elementary_divisors);
            assert!((o.regulator.mid() - r.regulator.mid()).abs() < 1e-6 * r.regulator.mid());
        }
    }

    #[test]
    fn relations_verify() {
        let k = field(0, 4, -1);
        let fb = factor_base(&k).unwrap();
        let rels = collect_relations(&k, &fb, 100_000, 7).unwrap();
        assert!(rels.iter().all(|r| r.verify(&k, &fb)));
    }

    #[test]
    fn two_rank_counts_even_factors() {
        assert_eq!(two_rank_of(&[2, 4, 12]), 3);
        assert_eq!(two_rank_of(&[3, 6]), 1);
        assert_eq!(two_rank_of(&[]), 0);
        assert!(is_divisibility_chain(&[2, 6]));
        assert!(!is_divisibility_chain(&[4, 6]));
    }
}
