//! Words over `{a, b}`, their evaluation on matrix pairs, and the walk
//! semantics behind it.
//!
//! Words are stored run-length encoded, so the constructed identities (tens
//! of thousands of letters, mostly long runs) stay small and evaluate with one
//! cached power per run.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::TropMatrix;
use crate::permanent::permanent;
use crate::ranks::{tropical_rank, TROPICAL_RANK_MAX};
use crate::scalar::{lcm_upto, TropScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            _ => None,
        }
    }
}

/// A nonempty word, as maximal runs `(letter, count)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    runs: Vec<(Letter, u64)>,
}

/// Words up to this length print letter by letter; longer ones print as runs.
const PLAIN_DISPLAY_MAX: u64 = 200;

impl Word {
    /// Builds a word from runs, merging neighbours and dropping empty runs.
    pub fn from_runs(runs: impl IntoIterator<Item = (Letter, u64)>) -> Result<Word> {
        let mut out: Vec<(Letter, u64)> = Vec::new();
        for (l, k) in runs {
            if k == 0 {
                continue;
            }
            match out.last_mut() {
                Some((last, count)) if *last == l => *count = count.checked_add(k).expect("word length overflow"),
                _ => out.push((l, k)),
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word { runs: out })
    }

    pub fn letter(l: Letter) -> Word {
        Word { runs: vec![(l, 1)] }
    }

    /// `l^k` for `k >= 1`.
    pub fn letter_power(l: Letter, k: u64) -> Word {
        assert!(k >= 1, "empty power");
        Word { runs: vec![(l, k)] }
    }

    pub fn runs(&self) -> &[(Letter, u64)] {
        &self.runs
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|&(_, k)| k).sum()
    }

    /// Always false; words are nonempty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn count(&self, l: Letter) -> u64 {
        self.runs.iter().filter(|&&(x, _)| x == l).map(|&(_, k)| k).sum()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.runs.iter().flat_map(|&(l, k)| std::iter::repeat_n(l, k as usize))
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_runs(self.runs.iter().chain(&other.runs).copied()).unwrap()
    }

    pub fn concat_all<'a>(words: impl IntoIterator<Item = &'a Word>) -> Result<Word> {
        Word::from_runs(words.into_iter().flat_map(|w| w.runs.iter().copied()))
    }

    /// `self^k` for `k >= 1`.
    pub fn power(&self, k: u64) -> Word {
        assert!(k >= 1, "empty power");
        Word::from_runs((0..k).flat_map(|_| self.runs.iter().copied())).unwrap()
    }

    /// Replaces every `a` by `u` and every `b` by `v`.
    pub fn substitute(&self, u: &Word, v: &Word) -> Word {
        let pick = |l: Letter| if l == Letter::A { u } else { v };
        let mut runs = Vec::new();
        for &(l, k) in &self.runs {
            let image = pick(l);
            if image.runs.len() == 1 {
                let (x, m) = image.runs[0];
                runs.push((x, m * k));
            } else {
                for _ in 0..k {
                    runs.extend_from_slice(&image.runs);
                }
            }
        }
        Word::from_runs(runs).unwrap()
    }

    pub fn reversed(&self) -> Word {
        Word { runs: self.runs.iter().rev().copied().collect() }
    }

    pub fn to_plain(&self) -> String {
        self.letters().map(Letter::as_char).collect()
    }

    /// Run-length form, e.g. `a^2 b a^6`.
    pub fn to_rle(&self) -> String {
        let parts: Vec<String> = self
            .runs
            .iter()
            .map(|&(l, k)| if k == 1 { l.as_char().to_string() } else { format!("{}^{k}", l.as_char()) })
            .collect();
        parts.join(" ")
    }
}

/// Number of occurrences of a letter.
pub fn occurrences(w: &Word, l: Letter) -> u64 {
    w.count(l)
}

/// Replaces every `a` by `u` and every `b` by `v`.
pub fn substitute(w: &Word, u: &Word, v: &Word) -> Word {
    w.substitute(u, v)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= PLAIN_DISPLAY_MAX {
            f.write_str(&self.to_plain())
        } else {
            f.write_str(&self.to_rle())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.to_rle())
    }
}

/// Accepts plain words (`abba`) and run-length forms (`a^6 b^6 a`), mixed
/// freely; whitespace is ignored.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut runs = Vec::new();
        let mut k = 0;
        while k < chars.len() {
            let l = Letter::from_char(chars[k])
                .ok_or_else(|| Error::Parse(format!("unexpected {:?} in word {s:?}", chars[k])))?;
            k += 1;
            let mut count = 1u64;
            if k < chars.len() && chars[k] == '^' {
                k += 1;
                let start = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..k].iter().collect();
                count = digits.parse().map_err(|_| Error::Parse(format!("bad exponent in word {s:?}")))?;
            }
            runs.push((l, count));
        }
        Word::from_runs(runs)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

fn check_pair(a: &TropMatrix, b: &TropMatrix, op: &'static str) -> Result<usize> {
    let n = a.order(op)?;
    if b.shape() != a.shape() {
        return Err(Error::DimensionMismatch { op, left: a.shape(), right: b.shape() });
    }
    Ok(n)
}

/// Evaluates words on a fixed pair `(A, B)`, caching the power of each run.
pub struct Evaluator<'a> {
    a: &'a TropMatrix,
    b: &'a TropMatrix,
    cache: HashMap<(Letter, u64), TropMatrix>,
}

impl<'a> Evaluator<'a> {
    pub fn new(a: &'a TropMatrix, b: &'a TropMatrix) -> Result<Self> {
        check_pair(a, b, "evaluate")?;
        Ok(Evaluator { a, b, cache: HashMap::new() })
    }

    fn run_power(&mut self, l: Letter, k: u64) -> &TropMatrix {
        let (a, b) = (self.a, self.b);
        self.cache.entry((l, k)).or_insert_with(|| {
            let base = if l == Letter::A { a } else { b };
            base.pow_by_squaring(k).unwrap()
        })
    }

    /// `w⟨A, B⟩`, streamed left to right over the runs.
    pub fn eval(&mut self, w: &Word) -> TropMatrix {
        let mut runs = w.runs().iter();
        let &(l, k) = runs.next().unwrap();
        let mut acc = self.run_power(l, k).clone();
        for &(l, k) in runs {
            acc = acc.otimes(self.run_power(l, k)).unwrap();
        }
        acc
    }
}

/// `w⟨A, B⟩`: the product along `w` with `a ↦ A`, `b ↦ B`.
pub fn evaluate(w: &Word, a: &TropMatrix, b: &TropMatrix) -> Result<TropMatrix> {
    Ok(Evaluator::new(a, b)?.eval(w))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabeledArc {
    pub from: usize,
    pub to: usize,
    pub label: Letter,
    pub weight: TropScalar,
}

/// The labeled-weighted digraph of a pair: an `a`-arc per finite entry of
/// `A` and a `b`-arc per finite entry of `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LwDigraph {
    pub node_count: usize,
    pub arcs: Vec<LabeledArc>,
}

impl LwDigraph {
    pub fn from_pair(a: &TropMatrix, b: &TropMatrix) -> Result<Self> {
        let n = check_pair(a, b, "lw_digraph")?;
        let mut arcs = Vec::new();
        for (label, m) in [(Letter::A, a), (Letter::B, b)] {
            for (from, to, weight) in m.finite_entries() {
                arcs.push(LabeledArc { from, to, label, weight });
            }
        }
        Ok(LwDigraph { node_count: n, arcs })
    }

    /// Heaviest `w`-labeled walk from `i` to every node.
    pub fn walk_values_from(&self, w: &Word, i: usize) -> Vec<TropScalar> {
        let mut cur = vec![TropScalar::BOTTOM; self.node_count];
        cur[i] = TropScalar::UNIT;
        for l in w.letters() {
            let mut next = vec![TropScalar::BOTTOM; self.node_count];
            for arc in self.arcs.iter().filter(|arc| arc.label == l) {
                let cand = cur[arc.from] + arc.weight;
                if cand > next[arc.to] {
                    next[arc.to] = cand;
                }
            }
            cur = next;
        }
        cur
    }

    /// The matrix of heaviest `w`-labeled walks; equals `w⟨A, B⟩`.
    pub fn walk_matrix(&self, w: &Word) -> TropMatrix {
        let rows: Vec<Vec<TropScalar>> = (0..self.node_count).map(|i| self.walk_values_from(w, i)).collect();
        TropMatrix::from_rows(rows).unwrap()
    }
}

/// Outcome of the three-part condition `per A = tr A`, `per B = tr B`,
/// `rk_tr(w⟨A, B⟩) = n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrReport {
    pub per_equals_trace_a: bool,
    pub per_equals_trace_b: bool,
    pub product_rank: usize,
    pub n: usize,
}

impl PrReport {
    pub fn holds(&self) -> bool {
        self.per_equals_trace_a && self.per_equals_trace_b && self.product_rank == self.n
    }
}

pub fn pr_condition(a: &TropMatrix, b: &TropMatrix, w: &Word) -> Result<PrReport> {
    let n = check_pair(a, b, "pr_condition")?;
    if n > TROPICAL_RANK_MAX {
        return Err(Error::SizeCap { op: "pr_condition", size: n, cap: TROPICAL_RANK_MAX });
    }
    Ok(PrReport {
        per_equals_trace_a: permanent(a)?.value == a.trace()?,
        per_equals_trace_b: permanent(b)?.value == b.trace()?,
        product_rank: tropical_rank(&evaluate(w, a, b)?)?.value,
        n,
    })
}

/// Under the condition above, checks `(w⟨A, B⟩)_ii = |w|_a A_ii + |w|_b B_ii`
/// for every `i`.
pub fn diagonal_formula_check(a: &TropMatrix, b: &TropMatrix, w: &Word) -> Result<bool> {
    if !pr_condition(a, b, w)?.holds() {
        return Err(Error::Precondition("the pair does not satisfy the PR condition".into()));
    }
    Ok(diagonal_formula_holds(a, b, w))
}

/// The diagonal formula itself, without checking its hypothesis.
pub fn diagonal_formula_holds(a: &TropMatrix, b: &TropMatrix, w: &Word) -> bool {
    let m = evaluate(w, a, b).unwrap();
    let (ka, kb) = (w.count(Letter::A) as i64, w.count(Letter::B) as i64);
    (0..a.rows()).all(|i| m.get(i, i) == a.get(i, i).scale(ka) + b.get(i, i).scale(kb))
}

/// Largest order accepted by [`one_cyclic_optimum`].
pub const ONE_CYCLIC_MAX: usize = 8;

/// Best weight of a `w`-labeled walk from `i` to `j` that never comes back to a
/// node it has left. Such a walk only moves forward in some ordering of the
/// nodes, so this is the maximum over orderings of the evaluation on the
/// pair with every backward arc removed.
pub fn one_cyclic_optimum(w: &Word, a: &TropMatrix, b: &TropMatrix, i: usize, j: usize) -> Result<TropScalar> {
    let n = check_pair(a, b, "one_cyclic_optimum")?;
    if n > ONE_CYCLIC_MAX {
        return Err(Error::SizeCap { op: "one_cyclic_optimum", size: n, cap: ONE_CYCLIC_MAX });
    }
    if i >= n || j >= n {
        return Err(Error::Precondition(format!("node out of range for {n} nodes")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = TropScalar::BOTTOM;
    loop {
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        if pos[i] <= pos[j] {
            let forward = |m: &TropMatrix| {
                TropMatrix::from_fn(n, n, |x, y| if pos[x] <= pos[y] { m.get(x, y) } else { TropScalar::BOTTOM })
            };
            best = best.max(evaluate(w, &forward(a), &forward(b))?.get(i, j));
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(best)
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let Some(k) = (1..p.len()).rev().find(|&k| p[k - 1] < p[k]) else {
        return false;
    };
    let l = (k..p.len()).rev().find(|&l| p[l] > p[k - 1]).unwrap();
    p.swap(k - 1, l);
    p[k..].reverse();
    true
}

/// If `A^n̄` has full tropical rank, checks `per(A^n̄) = tr(A^n̄)`; otherwise
/// there is nothing to check and the result is `true`.
pub fn perm_trace_power_check(a: &TropMatrix) -> Result<bool> {
    let n = a.order("perm_trace_power_check")?;
    let power = a.pow(lcm_upto(n as u64))?;
    if tropical_rank(&power)?.value < n {
        return Ok(true);
    }
    Ok(permanent(&power)?.value == power.trace()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn m(s: &str) -> TropMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(w("abba").runs(), &[(Letter::A, 1), (Letter::B, 2), (Letter::A, 1)]);
        assert_eq!(w("a^6 b^6"), w("aaaaaabbbbbb"));
        assert_eq!(w("a^2 a b"), w("aaab"));
        assert_eq!(w("ab ba").to_plain(), "abba");
        assert_eq!(w("aabbb").to_rle(), "a^2 b^3");
        assert!(matches!("".parse::<Word>(), Err(Error::EmptyWord)));
        assert!(matches!("a^0".parse::<Word>(), Err(Error::EmptyWord)));
        assert!("abc".parse::<Word>().is_err());
        let long = w("a^300 b");
        assert_eq!(long.to_string(), "a^300 b");
        assert_eq!(long.to_string().parse::<Word>().unwrap(), long);
    }

    #[test]
    fn counting_and_substitution() {
        assert_eq!(occurrences(&w("abba"), Letter::A), 2);
        assert_eq!(occurrences(&w("a^5"), Letter::B), 0);
        assert_eq!(substitute(&w("ab"), &w("aa"), &w("ba")), w("aaba"));
        assert_eq!(w("abba").substitute(&w("a"), &w("b")), w("abba"));
        assert_eq!(w("ab").power(3), w("ababab"));
        assert_eq!(w("aab").reversed(), w("baa"));
    }

    #[test]
    fn evaluation_examples() {
        let a = m("0 1; -inf 0");
        let b = m("0 -inf; 2 0");
        assert_eq!(evaluate(&w("a"), &a, &b).unwrap(), a);
        assert_eq!(evaluate(&w("ab"), &a, &b).unwrap(), m("3 1; 2 0"));
        assert_eq!(evaluate(&w("a^7"), &a, &b).unwrap(), a.pow(7).unwrap());
        let g = LwDigraph::from_pair(&a, &b).unwrap();
        for s in ["ab", "abba", "b^3 a^2 b"] {
            assert_eq!(g.walk_matrix(&w(s)), evaluate(&w(s), &a, &b).unwrap());
        }
        assert!(evaluate(&w("a"), &a, &TropMatrix::identity(3)).is_err());
    }

    #[test]
    fn pr_examples() {
        let i2 = TropMatrix::identity(2);
        assert!(pr_condition(&i2, &i2, &w("ab")).unwrap().holds());
        let r = pr_condition(&m("1 2; 3 4"), &i2, &w("ab")).unwrap();
        assert!(r.per_equals_trace_a && r.per_equals_trace_b);
        assert_eq!(r.product_rank, 1);
        assert!(!r.holds());
        assert!(diagonal_formula_check(&i2, &i2, &w("abab")).unwrap());
        assert!(diagonal_formula_check(&m("1 2; 3 4"), &i2, &w("ab")).is_err());
    }

    #[test]
    fn diagonal_formula_needs_its_hypothesis() {
        // per(A) = 2 > tr(A) = 0: the 2-cycle beats the loops.
        let a = m("0 1; 1 0");
        let i2 = TropMatrix::identity(2);
        assert!(!pr_condition(&a, &i2, &w("aa")).unwrap().holds());
        assert!(!diagonal_formula_holds(&a, &i2, &w("aa")));
    }

    #[test]
    fn one_cyclic_examples() {
        let a = m("2");
        let b = m("-1");
        assert_eq!(one_cyclic_optimum(&w("aab"), &a, &b, 0, 0).unwrap(), TropScalar::int(3));
        // The only walk labeled aa from 0 to 0 goes 0 -> 1 -> 0.
        let a = m("-inf 0; 0 -inf");
        assert_eq!(one_cyclic_optimum(&w("aa"), &a, &a, 0, 0).unwrap(), TropScalar::BOTTOM);
        assert_eq!(evaluate(&w("aa"), &a, &a).unwrap().get(0, 0), TropScalar::UNIT);
    }

    #[test]
    fn perm_trace_examples() {
        assert!(perm_trace_power_check(&TropMatrix::identity(3)).unwrap());
        assert!(perm_trace_power_check(&m("0 0; 0 0")).unwrap());
        assert!(perm_trace_power_check(&m("3 -1; 0 5")).unwrap());
    }

    #[test]
    fn permutations_are_lexicographic() {
        let mut p = vec![0, 1, 2];
        let mut all = vec![p.clone()];
        while next_permutation(&mut p) {
            all.push(p.clone());
        }
        assert_eq!(all.len(), 6);
        assert_eq!(all[1], vec![0, 2, 1]);
        assert_eq!(all[5], vec![2, 1, 0]);
    }
}
