//! The lattice generated by unit log vectors seen so far.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exactmath::matrix::row_hnf;
use crate::exactmath::{IntMatrix, Interval};

/// Largest denominator tried when reading a dependent log vector as a
/// rational combination of the current basis.
const MAX_DENOMINATOR: i64 = 10_000;
/// Widest coefficient enclosure still read as a rational.
const MAX_COEFF_WIDTH: f64 = 1e-3;

/// Shortest log vectors kept for rebuilding the lattice.
const POOL_SIZE: usize = 24;

#[derive(Clone, Debug)]
pub(crate) struct UnitLattice {
    rank: usize,
    basis: Vec<Vec<Interval>>,
    pool: Vec<(f64, Vec<Interval>)>,
}

fn mids(v: &[Interval]) -> Vec<f64> {
    v.iter().map(|x| x.mid()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: &[Interval], c: &Interval, b: &[Interval]) -> Vec<Interval> {
    a.iter().zip(b).map(|(x, y)| *x + *c * *y).collect()
}

impl UnitLattice {
    /// Lattice in `R^rank`, fed with log vectors over `rank + 1` places
    /// (the last coordinate is dropped).
    pub fn new(rank: usize) -> Self {
        Self {
            rank,
            basis: Vec::new(),
            pool: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.rank
    }

    /// Adds a unit's log vector; returns whether the lattice grew.
    ///
    /// Coefficients against the current basis are enclosed by intervals;
    /// a vector whose coefficients cannot be pinned to a unique rational
    /// with denominator small against the enclosure width is ignored.
    /// Short vectors are also pooled, and the lattice is rebuilt from the
    /// pool when that gives a finer one: long combined logs carry wide
    /// enclosures that would otherwise block later reconstructions.
    pub fn add(&mut self, log: &[Interval]) -> bool {
        let x: Vec<Interval> = log[..self.rank].to_vec();
        if x.iter().all(|c| c.contains_zero()) || x.iter().any(|c| !c.is_finite()) {
            return false;
        }
        let grew = self.absorb(x.clone());
        if !self.pool_insert(x) {
            return grew;
        }
        let mut fresh = UnitLattice::new(self.rank);
        for (_, v) in &self.pool {
            fresh.absorb(v.clone());
        }
        for v in &self.basis {
            fresh.absorb(v.clone());
        }
        let finer = match (fresh.regulator(), self.regulator()) {
            (Some(a), Some(b)) => a.mid() < b.mid() * (1.0 - 1e-6),
            _ => fresh.len() > self.len(),
        };
        if finer {
            self.basis = fresh.basis;
        }
        grew || finer
    }

    /// Keeps `x` among the shortest pooled vectors; false when it is too
    /// long or already pooled up to sign.
    fn pool_insert(&mut self, x: Vec<Interval>) -> bool {
        let m = mids(&x);
        let norm = dot(&m, &m);
        if self.pool.len() == POOL_SIZE && norm >= self.pool[POOL_SIZE - 1].0 {
            return false;
        }
        let tol = 1e-9 * norm.sqrt().max(1.0);
        let same = |v: &[Interval], sign: f64| v.iter().zip(&m).all(|(a, b)| (a.mid() - sign * b).abs() <= tol);
        if self.pool.iter().any(|(_, v)| same(v, 1.0) || same(v, -1.0)) {
            return false;
        }
        let at = self.pool.partition_point(|(n, _)| *n <= norm);
        self.pool.insert(at, (norm, x));
        self.pool.truncate(POOL_SIZE);
        true
    }

    /// Adds `x` to the lattice generated by the basis; returns whether it
    /// grew.
    fn absorb(&mut self, x: Vec<Interval>) -> bool {
        let m = self.basis.len();
        let c = match (self.rank, m) {
            (_, 0) => {
                self.basis.push(x);
                return true;
            }
            (1, 1) => vec![x[0] / self.basis[0][0]],
            (2, 1) => {
                let b = &self.basis[0];
                let det = b[0] * x[1] - b[1] * x[0];
                if !det.contains_zero() {
                    self.basis.push(x);
                    self.reduce();
                    return true;
                }
                let i = if b[0].abs().lo >= b[1].abs().lo { 0 } else { 1 };
                vec![x[i] / b[i]]
            }
            (2, 2) => {
                let (b, d) = (&self.basis[0], &self.basis[1]);
                let det = b[0] * d[1] - b[1] * d[0];
                vec![
                    (x[0] * d[1] - x[1] * d[0]) / det,
                    (b[0] * x[1] - b[1] * x[0]) / det,
                ]
            }
            _ => unreachable!("cubic fields have unit rank 1 or 2"),
        };
        let w = c.iter().map(Interval::width).fold(0.0, f64::max);
        if !w.is_finite() || w > MAX_COEFF_WIDTH {
            return false;
        }
        // two rationals with denominators at most qmax differ by more than 2w
        let qmax = ((0.5 / w).sqrt().floor() as i64).clamp(1, MAX_DENOMINATOR);
        let Some((q, num)) = (1..=qmax).find_map(|q| {
            let num: Vec<f64> = c.iter().map(|cj| (cj.mid() * q as f64).round()).collect();
            c.iter()
                .zip(&num)
                .all(|(cj, n)| (*cj * q as f64).contains(*n))
                .then_some((q, num))
        }) else {
            return false;
        };
        if q == 1 {
            self.refresh(x, &num);
            return false;
        }
        // lattice spanned by q e_j and q c, divided by q
        let mut rows: Vec<Vec<BigInt>> = (0..m)
            .map(|i| (0..m).map(|j| BigInt::from(if i == j { q } else { 0 })).collect())
            .collect();
        rows.push(num.iter().map(|n| BigInt::from(*n as i64)).collect());
        let h = row_hnf(&IntMatrix::from_rows(rows));
        let old = std::mem::take(&mut self.basis);
        for i in 0..h.rows() {
            let mut v = vec![Interval::point(0.0); self.rank];
            for (j, b) in old.iter().enumerate() {
                let coef = Interval::from_rational(&BigRational::new(h.get(i, j).clone(), q.into()));
                v = axpy(&v, &coef, b);
            }
            self.basis.push(v);
        }
        self.reduce();
        true
    }

    /// Swaps the lattice vector `x = sum num_j b_j` in for the widest basis
    /// vector with `num_j = +-1`, when `x` is the tighter enclosure.
    fn refresh(&mut self, x: Vec<Interval>, num: &[f64]) {
        let width = |v: &[Interval]| v.iter().map(Interval::width).sum::<f64>();
        let Some(j) = (0..num.len())
            .filter(|&j| num[j].abs() == 1.0)
            .max_by(|&i, &j| width(&self.basis[i]).total_cmp(&width(&self.basis[j])))
        else {
            return;
        };
        if width(&x) < width(&self.basis[j]) {
            self.basis[j] = x;
            self.reduce();
        }
    }

    /// Lagrange reduction of the basis (pairwise, repeated).
    fn reduce(&mut self) {
        let n = self.basis.len();
        for _ in 0..64 {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let (bi, bj) = (mids(&self.basis[i]), mids(&self.basis[j]));
                    let nj = dot(&bj, &bj);
                    let mu = (dot(&bi, &bj) / nj).round();
                    if mu != 0.0 && nj > 0.0 {
                        let cand: Vec<f64> = bi.iter().zip(&bj).map(|(x, y)| x - mu * y).collect();
                        if dot(&cand, &cand) < dot(&bi, &bi) {
                            let c = Interval::point(-mu);
                            self.basis[i] = axpy(&self.basis[i], &c, &self.basis[j].clone());
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Absolute determinant of the basis, once it has full rank.
    pub fn regulator(&self) -> Option<Interval> {
        if !self.is_full() {
            return None;
        }
        let b = &self.basis;
        Some(match self.rank {
            1 => b[0][0].abs(),
            2 => (b[0][0] * b[1][1] - b[0][1] * b[1][0]).abs(),
            _ => unreachable!("cubic fields have unit rank 1 or 2"),
        })
    }

    pub fn basis(&self) -> &[Vec<Interval>] {
        &self.basis
    }
}
