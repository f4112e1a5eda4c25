//! Tropical permanents and nonsingularity.
//!
//! Small matrices are handled by enumerating permutations, which also yields
//! the full list of optimal permutations. Larger ones go through an optimal
//! assignment plus a second-best assignment to decide uniqueness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::TropMatrix;
use crate::scalar::{Rational, TropScalar};

/// Largest order handled by permutation enumeration.
pub const EXHAUSTIVE_MAX: usize = 8;
/// Default cap on the number of optimal permutations recorded.
pub const DEFAULT_TIE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PermanentStrategy {
    Exhaustive,
    Assignment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermanentReport {
    pub value: TropScalar,
    /// Permutations attaining `value` (as `i -> perm[i]`), at most the tie cap.
    /// Empty when the permanent is `-inf`. The assignment strategy records the
    /// optimum and any tied permutation it met while testing uniqueness.
    pub optimal_permutations: Vec<Vec<usize>>,
    /// More optimal permutations exist than were recorded.
    pub overflow: bool,
    pub unique: bool,
    pub strategy: PermanentStrategy,
}

impl PermanentReport {
    /// The unique optimal permutation of a nonsingular matrix.
    pub fn tau(&self) -> Option<&[usize]> {
        if self.unique {
            self.optimal_permutations.first().map(Vec::as_slice)
        } else {
            None
        }
    }
}

/// Weight of a permutation: `sum_i A[i][perm[i]]`.
pub fn permutation_weight(a: &TropMatrix, perm: &[usize]) -> TropScalar {
    perm.iter().enumerate().fold(TropScalar::UNIT, |acc, (i, &j)| acc + a.get(i, j))
}

/// Permanent with the default strategy choice.
pub fn permanent(a: &TropMatrix) -> Result<PermanentReport> {
    let n = a.order("permanent")?;
    let strategy = if n <= EXHAUSTIVE_MAX { PermanentStrategy::Exhaustive } else { PermanentStrategy::Assignment };
    permanent_with(a, strategy, DEFAULT_TIE_CAP)
}

pub fn permanent_with(a: &TropMatrix, strategy: PermanentStrategy, tie_cap: usize) -> Result<PermanentReport> {
    let n = a.order("permanent")?;
    match strategy {
        PermanentStrategy::Exhaustive => {
            if n > EXHAUSTIVE_MAX {
                return Err(Error::SizeCap { op: "permanent (exhaustive)", size: n, cap: EXHAUSTIVE_MAX });
            }
            Ok(exhaustive(a, tie_cap))
        }
        PermanentStrategy::Assignment => Ok(by_assignment(a, tie_cap)),
    }
}

/// True iff the permanent is finite and attained by exactly one permutation.
pub fn is_nonsingular(a: &TropMatrix) -> Result<bool> {
    let n = a.order("is_nonsingular")?;
    if n <= EXHAUSTIVE_MAX {
        let mut search = Enumeration::new(a, 0);
        search.run();
        Ok(search.best.is_finite() && search.count == 1)
    } else {
        Ok(by_assignment(a, 1).unique)
    }
}

struct Enumeration<'a> {
    a: &'a TropMatrix,
    n: usize,
    cap: usize,
    best: TropScalar,
    count: usize,
    ties: Vec<Vec<usize>>,
    perm: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> Enumeration<'a> {
    fn new(a: &'a TropMatrix, cap: usize) -> Self {
        let n = a.rows();
        Enumeration {
            a,
            n,
            cap,
            best: TropScalar::BOTTOM,
            count: 0,
            ties: Vec::new(),
            perm: Vec::with_capacity(n),
            used: vec![false; n],
        }
    }

    fn run(&mut self) {
        self.descend(0, TropScalar::UNIT);
    }

    // Bottom partial sums are pruned: they can never be optimal unless every
    // permutation is bottom, which the caller reads off `best`.
    fn descend(&mut self, row: usize, acc: TropScalar) {
        if row == self.n {
            if acc > self.best {
                self.best = acc;
                self.count = 1;
                self.ties.clear();
                if self.cap > 0 {
                    self.ties.push(self.perm.clone());
                }
            } else if acc == self.best {
                self.count += 1;
                if self.ties.len() < self.cap {
                    self.ties.push(self.perm.clone());
                }
            }
            return;
        }
        for col in 0..self.n {
            if self.used[col] {
                continue;
            }
            let x = self.a.get(row, col);
            if x.is_bottom() {
                continue;
            }
            self.used[col] = true;
            self.perm.push(col);
            self.descend(row + 1, acc + x);
            self.perm.pop();
            self.used[col] = false;
        }
    }
}

fn exhaustive(a: &TropMatrix, tie_cap: usize) -> PermanentReport {
    let mut search = Enumeration::new(a, tie_cap);
    search.run();
    let finite = search.best.is_finite();
    PermanentReport {
        value: search.best,
        optimal_permutations: if finite { search.ties } else { Vec::new() },
        overflow: finite && search.count > tie_cap,
        unique: finite && search.count == 1,
        strategy: PermanentStrategy::Exhaustive,
    }
}

fn by_assignment(a: &TropMatrix, tie_cap: usize) -> PermanentReport {
    let n = a.rows();
    let best_perm = max_weight_assignment(a);
    let best = permutation_weight(a, &best_perm);
    if best.is_bottom() {
        return PermanentReport {
            value: best,
            optimal_permutations: Vec::new(),
            overflow: false,
            unique: false,
            strategy: PermanentStrategy::Assignment,
        };
    }
    // Any other permutation disagrees with the optimum in some row, so the
    // second-best weight is the best over "optimum with (i, best[i]) removed".
    let mut ties = vec![best_perm.clone()];
    let mut second = TropScalar::BOTTOM;
    for i in 0..n {
        let mut forbidden = a.clone();
        forbidden.set(i, best_perm[i], TropScalar::BOTTOM);
        let perm = max_weight_assignment(&forbidden);
        let w = permutation_weight(&forbidden, &perm);
        if w == best && !ties.contains(&perm) && ties.len() < tie_cap.max(1) {
            ties.push(perm);
        }
        second = second.max(w);
    }
    PermanentReport {
        value: best,
        optimal_permutations: ties,
        overflow: false,
        unique: second < best,
        strategy: PermanentStrategy::Assignment,
    }
}

/// Maximum-weight perfect assignment (Hungarian method with potentials).
///
/// Bottom entries get a penalty larger than the spread of all finite
/// permutation weights, so a permutation using one is only returned when no
/// fully finite permutation exists.
pub fn max_weight_assignment(a: &TropMatrix) -> Vec<usize> {
    let n = a.rows();
    let spread = a
        .entries()
        .iter()
        .filter_map(TropScalar::finite)
        .fold(Rational::from_integer(1), |acc, x| acc + if x < Rational::from_integer(0) { -x } else { x });
    let penalty = spread * Rational::from_integer(n as i64 + 1);
    let cost = |i: usize, j: usize| -> Rational {
        match a.get(i, j) {
            TropScalar::Finite(x) => -x,
            TropScalar::Bottom => penalty,
        }
    };

    // 1-indexed potentials; p[j] is the row matched to column j.
    let zero = Rational::from_integer(0);
    let mut u = vec![zero; n + 1];
    let mut v = vec![zero; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if minv[j].is_none_or(|m| cur < m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                if let Some(m) = minv[j] {
                    if delta.is_none_or(|d| m < d) {
                        delta = Some(m);
                        j1 = j;
                    }
                }
            }
            let delta = delta.expect("a free column always exists");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else if let Some(m) = minv[j].as_mut() {
                    *m -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    perm
}
