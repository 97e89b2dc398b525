//! Incremental Hermite reduction of relation vectors, tracking the log
//! embeddings of the combined elements.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactmath::arith::ext_gcd;
use crate::exactmath::{IntMatrix, Interval};

#[derive(Clone, Debug)]
struct Row {
    v: Vec<BigInt>,
    log: Vec<Interval>,
}

fn combine(a: &Row, ca: &BigInt, b: &Row, cb: &BigInt) -> Row {
    let v = a.v.iter().zip(&b.v).map(|(x, y)| ca * x + cb * y).collect();
    let log = a
        .log
        .iter()
        .zip(&b.log)
        .map(|(x, y)| combine_iv(*x, ca, *y, cb))
        .collect();
    Row { v, log }
}

fn combine_iv(x: Interval, ca: &BigInt, y: Interval, cb: &BigInt) -> Interval {
    let part = |iv: Interval, c: &BigInt| {
        if c.is_zero() {
            Interval::point(0.0)
        } else if c.is_one() {
            iv
        } else {
            iv.scale_int(c)
        }
    };
    part(x, ca) + part(y, cb)
}

/// Upper triangular basis of the relation lattice, one row per pivot column.
#[derive(Clone, Debug)]
pub(crate) struct RelationLattice {
    width: usize,
    places: usize,
    rows: Vec<Option<Row>>,
}

pub(crate) enum Insertion {
    /// The lattice changed.
    Grew,
    /// The relation was already in the lattice; the log vector of the
    /// resulting unit.
    Unit(Vec<Interval>),
}

impl RelationLattice {
    pub fn new(width: usize, places: usize) -> Self {
        Self {
            width,
            places,
            rows: vec![None; width],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.width
    }

    /// Product of the pivots: the index of the lattice in `Z^width` when
    /// it has full rank.
    pub fn determinant(&self) -> BigInt {
        self.rows
            .iter()
            .enumerate()
            .map(|(j, r)| r.as_ref().map_or_else(BigInt::zero, |r| r.v[j].clone()))
            .product()
    }

    pub fn insert(&mut self, v: Vec<BigInt>, log: Vec<Interval>) -> Insertion {
        debug_assert_eq!(v.len(), self.width);
        debug_assert_eq!(log.len(), self.places);
        let mut cur = Row { v, log };
        let mut grew = false;
        loop {
            let Some(j) = cur.v.iter().position(|x| !x.is_zero()) else {
                return if grew { Insertion::Grew } else { Insertion::Unit(cur.log) };
            };
            match self.rows[j].take() {
                None => {
                    if cur.v[j].is_negative() {
                        let m1 = -BigInt::one();
                        cur = combine(&cur, &m1, &cur, &BigInt::zero());
                    }
                    self.rows[j] = Some(cur);
                    return Insertion::Grew;
                }
                Some(b) => {
                    let (bj, cj) = (b.v[j].clone(), cur.v[j].clone());
                    if cj.is_multiple_of(&bj) {
                        let q = -(&cj / &bj);
                        cur = combine(&cur, &BigInt::one(), &b, &q);
                        self.rows[j] = Some(b);
                    } else {
                        let (g, s, t) = ext_gcd(&bj, &cj);
                        let nb = combine(&b, &s, &cur, &t);
                        let nc = combine(&cur, &(&bj / &g), &b, &(-(&cj / &g)));
                        self.rows[j] = Some(nb);
                        cur = nc;
                        grew = true;
                    }
                }
            }
        }
    }

    /// The triangular basis as a square matrix (zero rows where no pivot).
    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(
            self.rows
                .iter()
                .map(|r| {
                    r.as_ref()
                        .map_or_else(|| vec![BigInt::zero(); self.width], |r| r.v.clone())
                })
                .collect(),
        )
    }
}
