//! Tropical rank and factor rank.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::TropMatrix;
use crate::permanent::is_nonsingular;
use crate::scalar::{Rational, TropScalar};

/// Largest `min(rows, cols)` accepted by the exhaustive submatrix search.
pub const TROPICAL_RANK_MAX: usize = 7;
/// Default number of complete tightness assignments the factor search may try.
pub const DEFAULT_FACTOR_BUDGET: u64 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankKind {
    Tropical,
    FactorExact,
    FactorUpper,
    FactorLower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RankCertificate {
    /// A nonsingular submatrix on these rows and columns.
    Submatrix { rows: Vec<usize>, cols: Vec<usize> },
    /// `A = B ⊗ C`.
    Factorization { b: TropMatrix, c: TropMatrix },
    /// The all-bottom matrix, written as an empty product.
    EmptyFactorization,
    /// `A = ⋁ col_k ⊗ row_k`.
    RankOneSum { terms: Vec<(Vec<TropScalar>, Vec<TropScalar>)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub value: usize,
    pub kind: RankKind,
    pub certificate: Option<RankCertificate>,
}

impl RankReport {
    /// Re-checks the certificate against `a`.
    pub fn validate(&self, a: &TropMatrix) -> Result<()> {
        let bad = |msg: String| Err(Error::Precondition(msg));
        match &self.certificate {
            None => Ok(()),
            Some(RankCertificate::Submatrix { rows, cols }) => {
                if rows.len() != self.value || cols.len() != self.value {
                    return bad(format!("submatrix size differs from rank {}", self.value));
                }
                if !is_nonsingular(&a.submatrix(rows, cols))? {
                    return bad("witness submatrix is singular".into());
                }
                Ok(())
            }
            Some(RankCertificate::Factorization { b, c }) => {
                if b.cols() != self.value {
                    return bad(format!("inner dimension {} differs from rank {}", b.cols(), self.value));
                }
                match b.otimes(c)?.first_difference(a) {
                    None => Ok(()),
                    Some((i, j)) => bad(format!("factorization differs from the matrix at ({i}, {j})")),
                }
            }
            Some(RankCertificate::EmptyFactorization) => {
                if self.value == 0 && a.is_all_bottom() {
                    Ok(())
                } else {
                    bad("empty factorization of a nonzero matrix".into())
                }
            }
            Some(RankCertificate::RankOneSum { terms }) => {
                if terms.len() != self.value {
                    return bad(format!("{} terms for rank {}", terms.len(), self.value));
                }
                rank_one_sum_bound(terms, a).map(|_| ())
            }
        }
    }
}

fn k_subsets(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            if go(v + 1, n, k, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    go(0, n, k, &mut Vec::with_capacity(k), &mut f)
}

/// Largest `k` with a nonsingular `k x k` submatrix, with the first witness in
/// lexicographic order of (rows, cols). The all-bottom matrix has rank 0.
pub fn tropical_rank(a: &TropMatrix) -> Result<RankReport> {
    let m = a.rows().min(a.cols());
    if m > TROPICAL_RANK_MAX {
        return Err(Error::SizeCap { op: "tropical_rank", size: m, cap: TROPICAL_RANK_MAX });
    }
    for k in (1..=m).rev() {
        let mut witness = None;
        k_subsets(a.rows(), k, |rows| {
            k_subsets(a.cols(), k, |cols| {
                let sub = a.submatrix(rows, cols);
                if is_nonsingular(&sub).expect("square by construction") {
                    witness = Some((rows.to_vec(), cols.to_vec()));
                    true
                } else {
                    false
                }
            })
        });
        if let Some((rows, cols)) = witness {
            return Ok(RankReport {
                value: k,
                kind: RankKind::Tropical,
                certificate: Some(RankCertificate::Submatrix { rows, cols }),
            });
        }
    }
    Ok(RankReport { value: 0, kind: RankKind::Tropical, certificate: None })
}

/// Smallest `k <= cap` with `A = B ⊗ C` (`B` is `rows x k`), with a witness.
pub fn factor_rank_exact(a: &TropMatrix, cap: usize) -> Result<RankReport> {
    factor_rank_exact_with_budget(a, cap, DEFAULT_FACTOR_BUDGET)
}

/// [`factor_rank_exact`] with an explicit search budget. When the budget or the
/// cap runs out first, the error carries the bracket the search established.
pub fn factor_rank_exact_with_budget(a: &TropMatrix, cap: usize, budget: u64) -> Result<RankReport> {
    if a.is_all_bottom() {
        return Ok(RankReport {
            value: 0,
            kind: RankKind::FactorExact,
            certificate: Some(RankCertificate::EmptyFactorization),
        });
    }
    let upper = a.rows().min(a.cols());
    let lower = if upper <= TROPICAL_RANK_MAX { tropical_rank(a)?.value.max(1) } else { 1 };
    let mut search = FactorSearch::new(a, budget);
    for k in lower..=upper.min(cap) {
        let found = if k == upper { Some(trivial_factorization(a)) } else { search.run(k) };
        if let Some((b, c)) = found {
            debug_assert_eq!(b.otimes(&c).ok().as_ref(), Some(a));
            return Ok(RankReport {
                value: k,
                kind: RankKind::FactorExact,
                certificate: Some(RankCertificate::Factorization { b, c }),
            });
        }
        if search.exhausted {
            return Err(Error::FactorSearchExhausted { lower: k, upper });
        }
    }
    Err(Error::FactorSearchExhausted { lower: lower.max(cap + 1), upper })
}

/// `I ⊗ A` or `A ⊗ I`, whichever has the smaller inner dimension.
fn trivial_factorization(a: &TropMatrix) -> (TropMatrix, TropMatrix) {
    if a.rows() <= a.cols() {
        (TropMatrix::identity(a.rows()), a.clone())
    } else {
        (a.clone(), TropMatrix::identity(a.cols()))
    }
}

/// Search over tightness assignments: every finite entry names the term that
/// attains it. Term `l` is then finite exactly on (rows of its entries) x
/// (columns of its entries), which must avoid the bottom entries of `A`; the
/// remaining question is a system of difference constraints.
struct FactorSearch<'a> {
    a: &'a TropMatrix,
    finite: Vec<(usize, usize, Rational)>,
    /// Column support of every row, as a bitmask.
    row_support: Vec<u64>,
    budget: u64,
    tried: u64,
    exhausted: bool,
}

impl<'a> FactorSearch<'a> {
    fn new(a: &'a TropMatrix, budget: u64) -> Self {
        let finite: Vec<_> = a.finite_entries().map(|(i, j, x)| (i, j, x.finite().unwrap())).collect();
        let mut row_support = vec![0u64; a.rows()];
        for &(i, j, _) in &finite {
            row_support[i] |= 1 << j;
        }
        FactorSearch { a, finite, row_support, budget, tried: 0, exhausted: false }
    }

    fn run(&mut self, k: usize) -> Option<(TropMatrix, TropMatrix)> {
        assert!(self.a.cols() <= 64 && self.a.rows() <= 64, "factor search supports at most 64 rows and columns");
        let mut assign = Vec::with_capacity(self.finite.len());
        let mut rows = vec![0u64; k];
        let mut cols = vec![0u64; k];
        self.descend(k, 0, &mut assign, &mut rows, &mut cols)
    }

    // Restricted-growth order: entry m may open at most one new term, which
    // removes the symmetry under relabelling the terms.
    fn descend(
        &mut self,
        k: usize,
        opened: usize,
        assign: &mut Vec<usize>,
        rows: &mut [u64],
        cols: &mut [u64],
    ) -> Option<(TropMatrix, TropMatrix)> {
        if self.exhausted {
            return None;
        }
        let m = assign.len();
        if m == self.finite.len() {
            self.tried += 1;
            if self.tried > self.budget {
                self.exhausted = true;
                return None;
            }
            return self.solve(k, assign, rows, cols);
        }
        let (i, j, _) = self.finite[m];
        for l in 0..(opened + 1).min(k) {
            let (r, c) = (rows[l] | 1 << i, cols[l] | 1 << j);
            let rectangle_ok = (0..self.a.rows()).filter(|&x| r & (1 << x) != 0).all(|x| self.row_support[x] & c == c);
            if !rectangle_ok {
                continue;
            }
            let saved = (rows[l], cols[l]);
            rows[l] = r;
            cols[l] = c;
            assign.push(l);
            let found = self.descend(k, opened.max(l + 1), assign, rows, cols);
            assign.pop();
            rows[l] = saved.0;
            cols[l] = saved.1;
            if found.is_some() || self.exhausted {
                return found;
            }
        }
        None
    }

    /// Bellman-Ford on `b[i][l] - d[l][j] <= A[i][j]` (with `d = -c`), plus the
    /// reverse inequality for tight entries.
    fn solve(&self, k: usize, assign: &[usize], rows: &[u64], cols: &[u64]) -> Option<(TropMatrix, TropMatrix)> {
        let (nr, nc) = (self.a.rows(), self.a.cols());
        let bvar = |i: usize, l: usize| l * nr + i;
        let dvar = |l: usize, j: usize| k * nr + l * nc + j;
        let nvars = k * (nr + nc);
        // Edge (u, v, w) encodes x_v <= x_u + w.
        let mut edges = Vec::new();
        for l in 0..k {
            for i in (0..nr).filter(|&i| rows[l] & (1 << i) != 0) {
                for j in (0..nc).filter(|&j| cols[l] & (1 << j) != 0) {
                    let x = self.a.get(i, j).finite().unwrap();
                    edges.push((dvar(l, j), bvar(i, l), x));
                }
            }
        }
        for (&(i, j, x), &l) in self.finite.iter().zip(assign) {
            edges.push((bvar(i, l), dvar(l, j), -x));
        }
        let mut dist = vec![Rational::from_integer(0); nvars];
        for round in 0..=nvars {
            let mut changed = false;
            for &(u, v, w) in &edges {
                let cand = dist[u] + w;
                if cand < dist[v] {
                    dist[v] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            if round == nvars {
                return None;
            }
        }
        let b = TropMatrix::from_fn(nr, k, |i, l| {
            if rows[l] & (1 << i) != 0 {
                TropScalar::Finite(dist[bvar(i, l)])
            } else {
                TropScalar::BOTTOM
            }
        });
        let c = TropMatrix::from_fn(k, nc, |l, j| {
            if cols[l] & (1 << j) != 0 {
                TropScalar::Finite(-dist[dvar(l, j)])
            } else {
                TropScalar::BOTTOM
            }
        });
        Some((b, c))
    }
}

/// Checks `⋁ col_k ⊗ row_k = target` and reports the number of terms as an
/// upper bound on the factor rank.
pub fn rank_one_sum_bound(terms: &[(Vec<TropScalar>, Vec<TropScalar>)], target: &TropMatrix) -> Result<RankReport> {
    let mut acc = TropMatrix::bottom(target.rows(), target.cols());
    for (col, row) in terms {
        if col.len() != target.rows() || row.len() != target.cols() {
            return Err(Error::DimensionMismatch {
                op: "rank_one_sum_bound",
                left: (col.len(), row.len()),
                right: target.shape(),
            });
        }
        acc = acc.oplus(&TropMatrix::outer(col, row))?;
    }
    if let Some((i, j)) = acc.first_difference(target) {
        return Err(Error::ReconstructionFailure {
            context: "rank_one_sum_bound",
            i,
            j,
            expected: target.get(i, j),
            found: acc.get(i, j),
        });
    }
    Ok(RankReport {
        value: terms.len(),
        kind: RankKind::FactorUpper,
        certificate: Some(RankCertificate::RankOneSum { terms: terms.to_vec() }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> TropMatrix {
        s.parse().unwrap()
    }

    fn zeros(n: usize) -> TropMatrix {
        TropMatrix::from_fn(n, n, |_, _| TropScalar::UNIT)
    }

    #[test]
    fn tropical_rank_examples() {
        for n in 1..5 {
            let r = tropical_rank(&TropMatrix::identity(n)).unwrap();
            assert_eq!(r.value, n);
            r.validate(&TropMatrix::identity(n)).unwrap();
            assert_eq!(tropical_rank(&zeros(n)).unwrap().value, 1);
        }
        assert_eq!(tropical_rank(&m("1 2; 3 4")).unwrap().value, 1);
        assert_eq!(tropical_rank(&TropMatrix::bottom(2, 3)).unwrap().value, 0);
        assert!(tropical_rank(&TropMatrix::identity(8)).is_err());
        let rect = m("0 -inf 5; 1 2 3");
        let r = tropical_rank(&rect).unwrap();
        assert_eq!(r.value, 2);
        r.validate(&rect).unwrap();
    }

    #[test]
    fn factor_rank_examples() {
        let r = factor_rank_exact(&TropMatrix::bottom(2, 2), 3).unwrap();
        assert_eq!(r.value, 0);
        r.validate(&TropMatrix::bottom(2, 2)).unwrap();
        let r = factor_rank_exact(&zeros(2), 2).unwrap();
        assert_eq!(r.value, 1);
        r.validate(&zeros(2)).unwrap();
        let r = factor_rank_exact(&TropMatrix::identity(3), 3).unwrap();
        assert_eq!(r.value, 3);
        r.validate(&TropMatrix::identity(3)).unwrap();
    }

    #[test]
    fn factor_rank_can_exceed_tropical_rank() {
        // A 4x4 0/-inf pattern: the complement of a perfect matching.
        let a = TropMatrix::from_fn(4, 4, |i, j| if i == j { TropScalar::BOTTOM } else { TropScalar::UNIT });
        let tr = tropical_rank(&a).unwrap().value;
        let fc = factor_rank_exact(&a, 4).unwrap();
        fc.validate(&a).unwrap();
        assert!(tr <= fc.value);
        assert_eq!(fc.value, 4);
        assert_eq!(tr, 2);
    }

    #[test]
    fn factor_rank_of_a_rank_two_matrix() {
        let a = m("0 0 -5; 0 0 -5; -5 -5 3");
        let r = factor_rank_exact(&a, 3).unwrap();
        assert_eq!(r.value, 2);
        r.validate(&a).unwrap();
    }

    #[test]
    fn cap_and_budget_errors() {
        let a = TropMatrix::identity(3);
        assert!(matches!(
            factor_rank_exact(&a, 2),
            Err(Error::FactorSearchExhausted { lower: 3, upper: 3 })
        ));
        // Support pruning alone settles this one without touching the budget.
        let b = TropMatrix::from_fn(4, 4, |i, j| if i == j { TropScalar::BOTTOM } else { TropScalar::UNIT });
        assert_eq!(factor_rank_exact_with_budget(&b, 4, 1).unwrap().value, 4);
        let c = TropMatrix::from_fn(4, 4, |i, j| TropScalar::int((i + j) as i64));
        assert!(matches!(
            factor_rank_exact_with_budget(&c, 4, 0),
            Err(Error::FactorSearchExhausted { lower: 1, upper: 4 })
        ));
        assert_eq!(factor_rank_exact_with_budget(&c, 4, 1).unwrap().value, 1);
    }

    #[test]
    fn rank_one_sums() {
        let z = vec![TropScalar::UNIT; 2];
        let r = rank_one_sum_bound(&[(z.clone(), z.clone())], &zeros(2)).unwrap();
        assert_eq!((r.value, r.kind), (1, RankKind::FactorUpper));
        let col = vec![TropScalar::UNIT, TropScalar::BOTTOM];
        match rank_one_sum_bound(&[(col, z)], &zeros(2)) {
            Err(Error::ReconstructionFailure { i: 1, j: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn report_json_round_trip() {
        let r = factor_rank_exact(&zeros(2), 2).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"factorization\""));
        let back: RankReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
