//! Exact verification of an identity on all matrices of a given support.
//!
//! Entry `(i, j)` of `w⟨A, B⟩` is the maximum, over `w`-labeled walks from
//! `i` to `j`, of a linear form in the entries of `A` and `B` whose
//! coefficients count how often the walk uses each arc. Two such maxima agree
//! for every real assignment iff the two sets of coefficient vectors have the
//! same convex hull. Sending an entry to bottom is a limit of real
//! assignments, so agreement over the reals carries over to all of `T`.

use std::collections::{BTreeSet, HashSet};

use num_integer::Integer;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::lp::{hull_membership, Membership};
use super::{Identity, Monoid};
use crate::error::Result;
use crate::matrix::TropMatrix;
use crate::scalar::TropScalar;
use crate::words::{evaluate, Letter, Word};

/// Default cap on the number of distinct coefficient vectors held at once.
pub const DEFAULT_EXACT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ExactVerdict {
    Proved { entries: usize, max_monomials: usize, hull_checks: usize },
    Refuted(Refutation),
    /// Walks from `start` produced more than the budget of distinct vectors.
    BudgetExceeded { start: usize, monomials: usize },
}

/// An entry where the two sides differ as functions, with a pair of matrices
/// exhibiting it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refutation {
    pub i: usize,
    pub j: usize,
    /// Coefficient vector of a walk on the larger side lying outside the
    /// hull of the other side.
    pub monomial: Vec<u32>,
    pub a: TropMatrix,
    pub b: TropMatrix,
    pub u_value: TropScalar,
    pub v_value: TropScalar,
}

struct Slots {
    n: usize,
    /// `index[letter][row * n + col]`
    index: [Vec<Option<usize>>; 2],
    count: usize,
}

impl Slots {
    fn new(monoid: Monoid) -> Slots {
        let n = monoid.n();
        let mut count = 0;
        let mut make = || {
            (0..n * n)
                .map(|rc| {
                    monoid.allows(rc / n, rc % n).then(|| {
                        count += 1;
                        count - 1
                    })
                })
                .collect::<Vec<_>>()
        };
        let a = make();
        let b = make();
        Slots { n, index: [a, b], count }
    }

    fn get(&self, l: Letter, r: usize, c: usize) -> Option<usize> {
        self.index[l as usize][r * self.n + c]
    }

    /// Matrices with the given slot values, bottom off the support.
    fn assign(&self, values: &[i64]) -> (TropMatrix, TropMatrix) {
        let n = self.n;
        let make = |l: Letter| {
            TropMatrix::from_fn(n, n, |r, c| match self.get(l, r, c) {
                Some(k) => TropScalar::int(values[k]),
                None => TropScalar::BOTTOM,
            })
        };
        (make(Letter::A), make(Letter::B))
    }
}

type Monomials = Vec<BTreeSet<Vec<u32>>>;

/// Coefficient vectors of all `w`-labeled walks from `start`, per end node.
fn walk_monomials(slots: &Slots, w: &Word, start: usize, budget: usize) -> std::result::Result<Monomials, usize> {
    let n = slots.n;
    let mut cur: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); n];
    cur[start].insert(vec![0; slots.count]);
    for l in w.letters() {
        let mut next: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); n];
        let mut total = 0;
        for (u, set) in cur.iter().enumerate() {
            for v in 0..n {
                let Some(k) = slots.get(l, u, v) else { continue };
                for e in set {
                    let mut f = e.clone();
                    f[k] += 1;
                    if next[v].insert(f) {
                        total += 1;
                    }
                }
            }
        }
        if total > budget {
            return Err(total);
        }
        cur = next;
    }
    Ok(cur.into_iter().map(|s| s.into_iter().collect()).collect())
}

/// Proves or refutes `u = v` on every matrix pair supported by `monoid`.
pub fn verify_exact(id: &Identity, monoid: Monoid, budget: usize) -> Result<ExactVerdict> {
    let slots = Slots::new(monoid);
    let n = slots.n;
    let mut max_monomials = 0;
    let mut hull_checks = 0;
    for i in 0..n {
        let mu = match walk_monomials(&slots, &id.u, i, budget) {
            Ok(m) => m,
            Err(monomials) => return Ok(ExactVerdict::BudgetExceeded { start: i, monomials }),
        };
        let mv = match walk_monomials(&slots, &id.v, i, budget) {
            Ok(m) => m,
            Err(monomials) => return Ok(ExactVerdict::BudgetExceeded { start: i, monomials }),
        };
        for j in 0..n {
            let (su, sv) = (&mu[j], &mv[j]);
            max_monomials = max_monomials.max(su.len()).max(sv.len());
            if su == sv {
                continue;
            }
            if su.is_empty() || sv.is_empty() {
                let monomial = su.iter().chain(sv).next().unwrap().clone();
                return Ok(ExactVerdict::Refuted(refutation(id, &slots, i, j, monomial, &vec![0; slots.count])));
            }
            // Queries: points of one side not on the other, against the other hull.
            let queries: Vec<(&Vec<u32>, &BTreeSet<Vec<u32>>)> = su
                .difference(sv)
                .map(|x| (x, sv))
                .chain(sv.difference(su).map(|y| (y, su)))
                .collect();
            hull_checks += queries.len();
            let found = queries.par_iter().find_map_first(|&(x, other)| {
                let pts: Vec<Vec<i64>> = other.iter().map(|p| p.iter().map(|&c| c as i64).collect()).collect();
                let xi: Vec<i64> = x.iter().map(|&c| c as i64).collect();
                let answer = hull_membership(&pts, &xi);
                assert!(certificate_holds(&answer, &pts, &xi), "hull certificate fails its own check");
                match answer {
                    Membership::Inside(_) => None,
                    Membership::Outside { z, .. } => Some((x.clone(), integer_direction(&z))),
                }
            });
            if let Some((monomial, values)) = found {
                return Ok(ExactVerdict::Refuted(refutation(id, &slots, i, j, monomial, &values)));
            }
        }
    }
    Ok(ExactVerdict::Proved { entries: n * n, max_monomials, hull_checks })
}

/// Re-checks an answer of the simplex: convex weights reproducing the point,
/// or a hyperplane strictly separating it from every point.
fn certificate_holds(answer: &Membership, pts: &[Vec<i64>], x: &[i64]) -> bool {
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    match answer {
        Membership::Inside(lambda) => {
            let total = lambda.iter().fold(BigRational::zero(), |acc, l| acc + l);
            total.is_one()
                && lambda.iter().all(|l| !l.is_negative())
                && (0..x.len()).all(|c| {
                    lambda.iter().zip(pts).fold(BigRational::zero(), |acc, (l, p)| acc + l * int(p[c])) == int(x[c])
                })
        }
        Membership::Outside { z, s } => {
            let value = |p: &[i64]| z.iter().zip(p).fold(s.clone(), |acc, (zc, &pc)| acc + zc * int(pc));
            value(x).is_positive() && pts.iter().all(|p| !value(p).is_positive())
        }
    }
}

/// Clears denominators of a rational direction.
fn integer_direction(z: &[BigRational]) -> Vec<i64> {
    let l = z.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    z.iter()
        .map(|x| (x.numer() * (&l / x.denom())).to_i64().expect("separating direction fits in i64"))
        .collect()
}

fn refutation(id: &Identity, slots: &Slots, i: usize, j: usize, monomial: Vec<u32>, values: &[i64]) -> Refutation {
    let (a, b) = slots.assign(values);
    let u_value = evaluate(&id.u, &a, &b).unwrap().get(i, j);
    let v_value = evaluate(&id.v, &a, &b).unwrap().get(i, j);
    assert_ne!(u_value, v_value, "separating assignment must split the entry");
    Refutation { i, j, monomial, a, b, u_value, v_value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_on_scalars_is_proved() {
        let id = Identity::parse("ab", "ba").unwrap();
        let v = verify_exact(&id, Monoid::Full(1), 1000).unwrap();
        assert!(matches!(v, ExactVerdict::Proved { max_monomials: 1, .. }), "{v:?}");
    }

    #[test]
    fn commutator_on_2x2_is_refuted() {
        let id = Identity::parse("ab", "ba").unwrap();
        let ExactVerdict::Refuted(r) = verify_exact(&id, Monoid::Full(2), 1000).unwrap() else { panic!() };
        let u = evaluate(&id.u, &r.a, &r.b).unwrap();
        let v = evaluate(&id.v, &r.a, &r.b).unwrap();
        assert_ne!(u.get(r.i, r.j), v.get(r.i, r.j));
    }

    #[test]
    fn unbalanced_pair_on_scalars_is_refuted() {
        let id = Identity::parse("a", "aa").unwrap();
        assert!(matches!(verify_exact(&id, Monoid::Full(1), 100).unwrap(), ExactVerdict::Refuted(_)));
    }

    #[test]
    fn budget_is_reported() {
        let id = Identity::parse("abababab", "babababa").unwrap();
        assert!(matches!(verify_exact(&id, Monoid::Full(3), 10).unwrap(), ExactVerdict::BudgetExceeded { .. }));
    }

    #[test]
    fn adjan_on_triangular_2x2() {
        let id = Identity::parse("abbaababba", "abbabaabba").unwrap();
        assert!(matches!(verify_exact(&id, Monoid::UpperTriangular(2), 100_000).unwrap(), ExactVerdict::Proved { .. }));
        assert!(matches!(verify_exact(&id, Monoid::Full(2), 100_000).unwrap(), ExactVerdict::Refuted(_)));
    }
}
