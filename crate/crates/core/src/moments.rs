//! Moment geometry for distributions of `|Cl[2]|`.
//!
//! A distribution on the values `2^n` has first and second moments
//! `(E[X], E[X^2])`; the set of attainable moment vectors is the closed
//! convex hull of the points `(2^n, 4^n)`. Since those points lie on the
//! parabola `y = x^2`, the lower boundary of the hull is the polygon through
//! consecutive support points and the hull is unbounded upwards. Everything
//! here is exact rational arithmetic, and every verdict carries a
//! certificate that [`FeasibilityCertificate::verify`] replays.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmath::ratstr;
use crate::{Error, Result};

/// Default truncation exponent for the mass-bound LP.
pub const DEFAULT_TRUNCATION: u32 = 64;

fn pow2(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << n)
}

/// Support `{2^n : n >= min_exponent, n not excluded}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub min_exponent: u32,
    pub excluded: BTreeSet<u32>,
}

impl Support {
    pub fn new(min_exponent: u32, excluded: impl IntoIterator<Item = u32>) -> Result<Self> {
        let excluded: BTreeSet<u32> = excluded.into_iter().collect();
        if let Some(&bad) = excluded.iter().find(|&&n| n < min_exponent) {
            return Err(Error::domain(format!(
                "excluded exponent {bad} is below the minimum exponent {min_exponent}"
            )));
        }
        Ok(Self {
            min_exponent,
            excluded,
        })
    }

    pub fn contains(&self, n: u32) -> bool {
        n >= self.min_exponent && !self.excluded.contains(&n)
    }

    /// Smallest remaining exponent.
    pub fn first(&self) -> u32 {
        self.next_from(self.min_exponent)
    }

    fn next_from(&self, mut n: u32) -> u32 {
        while self.excluded.contains(&n) {
            n += 1;
        }
        n
    }

    /// Smallest remaining exponent strictly above `n`.
    pub fn next_after(&self, n: u32) -> u32 {
        self.next_from(n + 1)
    }

    /// Remaining exponents `<= max`, ascending.
    pub fn exponents_up_to(&self, max: u32) -> Vec<u32> {
        (self.min_exponent..=max).filter(|&n| self.contains(n)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentProblem {
    pub min_exponent: u32,
    pub excluded: BTreeSet<u32>,
    #[serde(with = "ratstr")]
    pub m1: BigRational,
    #[serde(with = "ratstr")]
    pub m2_upper: BigRational,
}

impl MomentProblem {
    pub fn new(
        min_exponent: u32,
        excluded: impl IntoIterator<Item = u32>,
        m1: BigRational,
        m2_upper: BigRational,
    ) -> Result<Self> {
        let support = Support::new(min_exponent, excluded)?;
        if m1 < pow2(min_exponent) {
            return Err(Error::domain(format!(
                "first moment {m1} is below 2^{min_exponent}"
            )));
        }
        Ok(Self {
            min_exponent,
            excluded: support.excluded,
            m1,
            m2_upper,
        })
    }

    pub fn support(&self) -> Support {
        Support {
            min_exponent: self.min_exponent,
            excluded: self.excluded.clone(),
        }
    }
}

/// Consecutive remaining exponents `(u, w)` with `2^u <= x <= 2^w`, `u`
/// chosen as large as possible; `None` when `x` is below the support.
fn bracket(support: &Support, x: &BigRational) -> Option<(u32, u32)> {
    let mut u = support.first();
    if x < &pow2(u) {
        return None;
    }
    loop {
        let w = support.next_after(u);
        if x < &pow2(w) {
            return Some((u, w));
        }
        u = w;
    }
}

/// The chord through `(2^u, 4^u)` and `(2^w, 4^w)` as `(slope, intercept)`.
fn chord(u: u32, w: u32) -> (BigRational, BigRational) {
    let (a, b) = (pow2(u), pow2(w));
    (&a + &b, -(&a * &b))
}

/// Value at `x` of the lower boundary of the closed convex hull.
pub fn lower_boundary(support: &Support, x: &BigRational) -> Result<BigRational> {
    let (u, w) = bracket(support, x).ok_or_else(|| {
        Error::domain(format!("{x} is below the smallest support abscissa"))
    })?;
    if x == &pow2(u) {
        return Ok(x * x);
    }
    let (s, t) = chord(u, w);
    Ok(s * x + t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessMass {
    pub exponent: u32,
    #[serde(with = "ratstr")]
    pub mass: BigRational,
}

/// The line `y = slope * x + intercept`; every support point lies on or
/// above it while the moment vector lies strictly below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatingLine {
    #[serde(with = "ratstr")]
    pub slope: BigRational,
    #[serde(with = "ratstr")]
    pub intercept: BigRational,
    /// Exponents of the support points the line passes through.
    pub through: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityCertificate {
    pub verdict: Verdict,
    pub problem: MomentProblem,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<WitnessMass>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub separating_line: Option<SeparatingLine>,
}

/// Decides whether `(m1, m2)` with `m2 <= m2_upper` lies in the closed
/// convex hull of the support points, with a certificate either way.
pub fn is_feasible(problem: &MomentProblem) -> FeasibilityCertificate {
    let support = problem.support();
    let (m1, m2) = (&problem.m1, &problem.m2_upper);
    let Some((u, w)) = bracket(&support, m1) else {
        // m1 sits left of every remaining point: a line through the first
        // point, steep enough to pass above (m1, m2).
        let f = support.first();
        let x0 = pow2(f);
        let y0 = &x0 * &x0;
        let steep = (&y0 - m2 - BigRational::one()) / (&x0 - m1);
        let slope = if steep.is_negative() { steep } else { BigRational::zero() };
        let intercept = &y0 - &slope * &x0;
        return FeasibilityCertificate {
            verdict: Verdict::Infeasible,
            problem: problem.clone(),
            witness: None,
            separating_line: Some(SeparatingLine {
                slope,
                intercept,
                through: vec![f],
            }),
        };
    };
    let (slope, intercept) = chord(u, w);
    let boundary = &slope * m1 + &intercept;
    if m2 >= &boundary {
        let (a, b) = (pow2(u), pow2(w));
        let pu = (&b - m1) / (&b - &a);
        let pw = (m1 - &a) / (&b - &a);
        let witness = [(u, pu), (w, pw)]
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(exponent, mass)| WitnessMass { exponent, mass })
            .collect();
        FeasibilityCertificate {
            verdict: Verdict::Feasible,
            problem: problem.clone(),
            witness: Some(witness),
            separating_line: None,
        }
    } else {
        FeasibilityCertificate {
            verdict: Verdict::Infeasible,
            problem: problem.clone(),
            witness: None,
            separating_line: Some(SeparatingLine {
                slope,
                intercept,
                through: vec![u, w],
            }),
        }
    }
}

impl FeasibilityCertificate {
    /// Replays the certificate in exact arithmetic.
    ///
    /// Separating lines are checked against every support point up to
    /// exponent `2 * DEFAULT_TRUNCATION` (or further, if the line is steep),
    /// and beyond that by monotonicity: `x^2 - slope*x - intercept` is
    /// increasing once `2x >= slope`.
    pub fn verify(&self) -> bool {
        let p = &self.problem;
        let support = p.support();
        match (self.verdict, &self.witness, &self.separating_line) {
            (Verdict::Feasible, Some(w), None) => {
                let mut total = BigRational::zero();
                let mut first = BigRational::zero();
                let mut second = BigRational::zero();
                for m in w {
                    if !support.contains(m.exponent) || m.mass.is_negative() {
                        return false;
                    }
                    let x = pow2(m.exponent);
                    total += &m.mass;
                    first += &m.mass * &x;
                    second += &m.mass * &x * &x;
                }
                total.is_one() && first == p.m1 && second <= p.m2_upper
            }
            (Verdict::Infeasible, None, Some(line)) => {
                let on_line = |n: u32| {
                    let x = pow2(n);
                    &x * &x - &line.slope * &x - &line.intercept
                };
                if !(p.m2_upper < &line.slope * &p.m1 + &line.intercept) {
                    return false;
                }
                let mut last = 2 * DEFAULT_TRUNCATION;
                while pow2(last) * BigRational::from_integer(2.into()) < line.slope {
                    last += 1;
                }
                support
                    .exponents_up_to(last)
                    .into_iter()
                    .all(|n| !on_line(n).is_negative())
                    && line.through.iter().all(|&n| support.contains(n) && on_line(n).is_zero())
            }
            _ => false,
        }
    }
}

/// Dual solution `(lambda0, lambda1, lambda2)` of the mass LP: the
/// quadratic `lambda0 + lambda1 x + lambda2 x^2` lies below the target
/// indicator on every support point, with `lambda2 <= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCertificate {
    #[serde(with = "ratstr")]
    pub lambda0: BigRational,
    #[serde(with = "ratstr")]
    pub lambda1: BigRational,
    #[serde(with = "ratstr")]
    pub lambda2: BigRational,
    /// First support exponent beyond the truncation; from there on the dual
    /// quadratic is non-positive and decreasing.
    pub tail_from: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinMassCertificate {
    pub problem: MomentProblem,
    pub target_exponent: u32,
    pub truncation: u32,
    #[serde(with = "ratstr")]
    pub minimum: BigRational,
    pub witness: Vec<WitnessMass>,
    pub dual: DualCertificate,
}

/// Exact minimum of the mass at `2^target` over all distributions on the
/// support with first moment `m1` and second moment at most `m2_upper`.
///
/// Solved as an LP on exponents up to `truncation`; the dual certificate
/// proves that support points beyond the truncation cannot lower the
/// minimum.
pub fn min_mass_at(
    problem: &MomentProblem,
    target_exponent: u32,
    truncation: u32,
) -> Result<MinMassCertificate> {
    let support = problem.support();
    if !support.contains(target_exponent) || target_exponent > truncation {
        return Err(Error::domain(format!(
            "target exponent {target_exponent} is not in the truncated support"
        )));
    }
    let feas = is_feasible(problem);
    if feas.verdict == Verdict::Infeasible {
        return Err(Error::Infeasible(Box::new(feas)));
    }
    let exps = support.exponents_up_to(truncation);
    let k = exps.len();
    // columns: p_n for each exponent, then the slack of the second moment row
    let mut a = vec![vec![BigRational::zero(); k + 1]; 3];
    for (j, &n) in exps.iter().enumerate() {
        let x = pow2(n);
        a[0][j] = BigRational::one();
        a[2][j] = &x * &x;
        a[1][j] = x;
    }
    a[2][k] = BigRational::one();
    let b = vec![BigRational::one(), problem.m1.clone(), problem.m2_upper.clone()];
    let mut c = vec![BigRational::zero(); k + 1];
    let t = exps.iter().position(|&n| n == target_exponent).expect("target in support");
    c[t] = BigRational::one();

    let sol = match lp::minimize(&a, &b, &c) {
        lp::Outcome::Optimal(sol) => sol,
        // the truncated support can be too short even if the full one works
        _ => {
            return Err(Error::domain(format!(
                "mass LP infeasible at truncation {truncation}"
            )))
        }
    };
    let witness: Vec<WitnessMass> = exps
        .iter()
        .zip(&sol.x)
        .filter(|(_, m)| !m.is_zero())
        .map(|(&exponent, m)| WitnessMass {
            exponent,
            mass: m.clone(),
        })
        .collect();
    let dual = DualCertificate {
        lambda0: sol.y[0].clone(),
        lambda1: sol.y[1].clone(),
        lambda2: sol.y[2].clone(),
        tail_from: support.next_after(truncation.max(support.first())),
    };
    let cert = MinMassCertificate {
        problem: problem.clone(),
        target_exponent,
        truncation,
        minimum: sol.value,
        witness,
        dual,
    };
    if !cert.verify() {
        return Err(Error::domain(format!(
            "truncation at 2^{truncation} could not be certified"
        )));
    }
    Ok(cert)
}

impl MinMassCertificate {
    /// Replays primal feasibility, dual feasibility on the truncated support,
    /// the tail argument, and equality of primal and dual objectives.
    pub fn verify(&self) -> bool {
        let p = &self.problem;
        let support = p.support();
        let d = &self.dual;
        let q = |x: &BigRational| &d.lambda0 + &d.lambda1 * x + &d.lambda2 * x * x;
        let mut total = BigRational::zero();
        let mut first = BigRational::zero();
        let mut second = BigRational::zero();
        let mut target_mass = BigRational::zero();
        for m in &self.witness {
            if !support.contains(m.exponent) || m.mass.is_negative() {
                return false;
            }
            let x = pow2(m.exponent);
            total += &m.mass;
            first += &m.mass * &x;
            second += &m.mass * &x * &x;
            if m.exponent == self.target_exponent {
                target_mass += &m.mass;
            }
        }
        if !(total.is_one() && first == p.m1 && second <= p.m2_upper) {
            return false;
        }
        if target_mass != self.minimum || d.lambda2.is_positive() {
            return false;
        }
        for n in support.exponents_up_to(self.truncation) {
            let c = if n == self.target_exponent {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            if q(&pow2(n)) > c {
                return false;
            }
        }
        // tail: q(x) <= 0 at the first point past the truncation and q is
        // non-increasing from there on
        let x = pow2(d.tail_from);
        if d.tail_from <= self.truncation || q(&x).is_positive() {
            return false;
        }
        let two = BigRational::from_integer(2.into());
        let slope_ok = if d.lambda2.is_zero() {
            !d.lambda1.is_positive()
        } else {
            // derivative lambda1 + 2 lambda2 x <= 0
            !(&d.lambda1 + &two * &d.lambda2 * &x).is_positive()
        };
        if !slope_ok {
            return false;
        }
        let dual_value = &d.lambda0 + &d.lambda1 * &p.m1 + &d.lambda2 * &p.m2_upper;
        dual_value == self.minimum
    }
}

mod lp {
    //! Dense two-phase simplex over exact rationals with Bland's rule.

    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    pub struct Solution {
        pub x: Vec<BigRational>,
        pub y: Vec<BigRational>,
        pub value: BigRational,
    }

    pub enum Outcome {
        Optimal(Solution),
        Infeasible,
        Unbounded,
    }

    struct Tableau {
        m: usize,
        width: usize,
        t: Vec<Vec<BigRational>>,
        basis: Vec<usize>,
    }

    impl Tableau {
        fn pivot(&mut self, row: usize, col: usize) {
            let piv = self.t[row][col].clone();
            for v in self.t[row].iter_mut() {
                *v = &*v / &piv;
            }
            let prow = self.t[row].clone();
            for (i, r) in self.t.iter_mut().enumerate() {
                if i == row || r[col].is_zero() {
                    continue;
                }
                let f = r[col].clone();
                for (v, p) in r.iter_mut().zip(&prow) {
                    *v -= &f * p;
                }
            }
            self.basis[row] = col;
        }

        /// Runs simplex on the objective row (last row), entering only
        /// columns `< allowed`. Returns false if unbounded.
        fn run(&mut self, allowed: usize) -> bool {
            let obj = self.m;
            loop {
                let Some(col) = (0..allowed).find(|&j| self.t[obj][j].is_negative()) else {
                    return true;
                };
                let rhs = self.width - 1;
                let mut best: Option<(usize, BigRational)> = None;
                for i in 0..self.m {
                    if !self.t[i][col].is_positive() {
                        continue;
                    }
                    let ratio = &self.t[i][rhs] / &self.t[i][col];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
                match best {
                    Some((row, _)) => self.pivot(row, col),
                    None => return false,
                }
            }
        }
    }

    /// Minimizes `c.x` subject to `A x = b`, `x >= 0`.
    pub fn minimize(a: &[Vec<BigRational>], b: &[BigRational], c: &[BigRational]) -> Outcome {
        let m = a.len();
        let n = c.len();
        let width = n + m + 1;
        let mut flip = vec![false; m];
        let mut t = vec![vec![BigRational::zero(); width]; m + 1];
        for i in 0..m {
            flip[i] = b[i].is_negative();
            let s = if flip[i] { -BigRational::one() } else { BigRational::one() };
            for j in 0..n {
                t[i][j] = &a[i][j] * &s;
            }
            t[i][n + i] = BigRational::one();
            t[i][width - 1] = &b[i] * &s;
        }
        // phase 1 objective: sum of artificials, expressed in non-basic terms
        for j in 0..width {
            if (n..n + m).contains(&j) {
                continue;
            }
            let s: BigRational = (0..m).map(|i| t[i][j].clone()).sum();
            t[m][j] = -s;
        }
        let mut tab = Tableau {
            m,
            width,
            t,
            basis: (n..n + m).collect(),
        };
        tab.run(n);
        if !tab.t[m][width - 1].is_zero() {
            return Outcome::Infeasible;
        }
        for i in 0..m {
            if tab.basis[i] >= n {
                if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                    tab.pivot(i, j);
                } else {
                    // redundant constraint; not expected for moment systems
                    return Outcome::Infeasible;
                }
            }
        }
        // phase 2 objective
        for j in 0..width {
            tab.t[m][j] = if j < n { c[j].clone() } else { BigRational::zero() };
        }
        for i in 0..m {
            let col = tab.basis[i];
            let f = tab.t[m][col].clone();
            if f.is_zero() {
                continue;
            }
            let row = tab.t[i].clone();
            for (v, r) in tab.t[m].iter_mut().zip(&row) {
                *v -= &f * r;
            }
        }
        if !tab.run(n) {
            return Outcome::Unbounded;
        }
        let mut x = vec![BigRational::zero(); n];
        for i in 0..m {
            x[tab.basis[i]] = tab.t[i][width - 1].clone();
        }
        let value: BigRational = x.iter().zip(c).map(|(a, b)| a * b).sum();
        // B^{-1} sits in the artificial columns
        let mut y = vec![BigRational::zero(); m];
        for (j, yj) in y.iter_mut().enumerate() {
            let mut s = BigRational::zero();
            for i in 0..m {
                s += &c[tab.basis[i]] * &tab.t[i][n + j];
            }
            *yj = if flip[j] { -s } else { s };
        }
        Outcome::Optimal(Solution { x, y, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn problem(min: u32, excl: &[u32], m1: &str, m2: &str) -> MomentProblem {
        MomentProblem::new(min, excl.iter().copied(), q(m1), q(m2)).unwrap()
    }

    #[test]
    fn boundary_values() {
        let s = Support::new(0, [1]).unwrap();
        assert_eq!(lower_boundary(&s, &q("3/2")).unwrap(), q("7/2"));
        assert_eq!(lower_boundary(&s, &q("4")).unwrap(), q("16"));
        assert_eq!(lower_boundary(&s, &q("1")).unwrap(), q("1"));
        let s2 = Support::new(0, [1, 2]).unwrap();
        assert_eq!(lower_boundary(&s2, &q("2")).unwrap(), q("10"));
        assert!(lower_boundary(&s2, &q("1/2")).is_err());
    }

    #[test]
    fn slope_argument_certificates() {
        let c = is_feasible(&problem(0, &[1], "3/2", "3"));
        assert_eq!(c.verdict, Verdict::Infeasible);
        let line = c.separating_line.as_ref().unwrap();
        assert_eq!((line.slope.clone(), line.intercept.clone()), (q("5"), q("-4")));
        assert_eq!(line.through, vec![0, 2]);
        assert!(c.verify());

        let c = is_feasible(&problem(0, &[1], "2", "6"));
        assert_eq!(c.verdict, Verdict::Feasible);
        let w = c.witness.as_ref().unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!((w[0].exponent, w[0].mass.clone()), (0, q("2/3")));
        assert_eq!((w[1].exponent, w[1].mass.clone()), (2, q("1/3")));
        assert!(c.verify());

        let c = is_feasible(&problem(0, &[1, 2], "2", "6"));
        assert_eq!(c.verdict, Verdict::Infeasible);
        assert!(c.verify());

        let c = is_feasible(&problem(1, &[2], "3", "12"));
        assert_eq!(c.verdict, Verdict::Infeasible);
        let line = c.separating_line.as_ref().unwrap();
        assert_eq!(&line.slope * q("3") + &line.intercept, q("14"));
        assert!(c.verify());
    }

    #[test]
    fn below_support_is_infeasible_with_line() {
        let c = is_feasible(&problem(0, &[0], "3/2", "100"));
        assert_eq!(c.verdict, Verdict::Infeasible);
        assert!(c.verify());
        let c = is_feasible(&problem(0, &[0], "3/2", "1"));
        assert!(c.verify());
    }

    #[test]
    fn tampered_certificates_fail_replay() {
        let mut c = is_feasible(&problem(0, &[1], "3/2", "3"));
        c.separating_line.as_mut().unwrap().slope = q("6");
        assert!(!c.verify());
        let mut c = is_feasible(&problem(0, &[1], "2", "6"));
        c.witness.as_mut().unwrap()[0].mass = q("1/2");
        assert!(!c.verify());
    }

    #[test]
    fn mass_bounds() {
        let c = min_mass_at(&problem(0, &[], "3/2", "3"), 1, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(c.minimum, q("1/4"));
        assert!(c.verify());
        let c = min_mass_at(&problem(0, &[], "1", "1"), 0, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(c.minimum, q("1"));
        let c = min_mass_at(&problem(0, &[], "2", "6"), 1, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(c.minimum, q("0"));
        assert!(c.verify());
    }

    #[test]
    fn infeasible_mass_problem_carries_certificate() {
        let e = min_mass_at(&problem(0, &[], "3/2", "2"), 1, DEFAULT_TRUNCATION).unwrap_err();
        match e {
            Error::Infeasible(c) => assert!(c.verify()),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn json_shape() {
        let c = is_feasible(&problem(0, &[1], "3/2", "3"));
        let j = serde_json::to_value(&c).unwrap();
        assert_eq!(j["verdict"], "infeasible");
        assert_eq!(j["separating_line"]["slope"], "5");
        assert_eq!(j["problem"]["m1"], "3/2");
        let back: FeasibilityCertificate = serde_json::from_value(j).unwrap();
        assert_eq!(back, c);
    }
}
