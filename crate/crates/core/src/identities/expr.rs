use std::sync::Arc;

use crate::matrix::TropMatrix;
use crate::words::{Evaluator, Letter, Word};

/// A word given by how it was built. Evaluating the structure costs a few
/// hundred products even when the word itself has tens of thousands of
/// letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordExpr {
    Word(Word),
    Concat(Vec<Arc<WordExpr>>),
    Power(Arc<WordExpr>, u64),
    /// `outer` with `a ↦ a_image`, `b ↦ b_image`.
    Subst { outer: Arc<WordExpr>, a_image: Arc<WordExpr>, b_image: Arc<WordExpr> },
}

impl WordExpr {
    pub fn word(w: Word) -> WordExpr {
        WordExpr::Word(w)
    }

    pub fn concat(parts: Vec<WordExpr>) -> WordExpr {
        assert!(!parts.is_empty(), "empty concatenation");
        WordExpr::Concat(parts.into_iter().map(Arc::new).collect())
    }

    pub fn power(self, k: u64) -> WordExpr {
        assert!(k >= 1, "empty power");
        WordExpr::Power(Arc::new(self), k)
    }

    pub fn subst(self, a_image: WordExpr, b_image: WordExpr) -> WordExpr {
        WordExpr::Subst { outer: Arc::new(self), a_image: Arc::new(a_image), b_image: Arc::new(b_image) }
    }

    pub fn count(&self, l: Letter) -> u64 {
        match self {
            WordExpr::Word(w) => w.count(l),
            WordExpr::Concat(parts) => parts.iter().map(|p| p.count(l)).sum(),
            WordExpr::Power(e, k) => k * e.count(l),
            WordExpr::Subst { outer, a_image, b_image } => {
                outer.count(Letter::A) * a_image.count(l) + outer.count(Letter::B) * b_image.count(l)
            }
        }
    }

    pub fn len(&self) -> u64 {
        self.count(Letter::A) + self.count(Letter::B)
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn materialize(&self) -> Word {
        match self {
            WordExpr::Word(w) => w.clone(),
            WordExpr::Concat(parts) => {
                let words: Vec<Word> = parts.iter().map(|p| p.materialize()).collect();
                Word::concat_all(&words).unwrap()
            }
            WordExpr::Power(e, k) => e.materialize().power(*k),
            WordExpr::Subst { outer, a_image, b_image } => {
                outer.materialize().substitute(&a_image.materialize(), &b_image.materialize())
            }
        }
    }

    /// The evaluation on `(A, B)`, following the structure.
    pub fn eval(&self, a: &TropMatrix, b: &TropMatrix) -> TropMatrix {
        match self {
            WordExpr::Word(w) => Evaluator::new(a, b).expect("matching square pair").eval(w),
            WordExpr::Concat(parts) => {
                let mut it = parts.iter();
                let first = it.next().unwrap().eval(a, b);
                it.fold(first, |acc, p| acc.otimes(&p.eval(a, b)).unwrap())
            }
            WordExpr::Power(e, k) => e.eval(a, b).pow_by_squaring(*k).unwrap(),
            WordExpr::Subst { outer, a_image, b_image } => outer.eval(&a_image.eval(a, b), &b_image.eval(a, b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::evaluate;

    #[test]
    fn structure_matches_materialized_word() {
        let w = |s: &str| WordExpr::word(s.parse().unwrap());
        let e = WordExpr::concat(vec![w("ab").power(3), w("b")]).subst(w("a^2"), w("ba"));
        assert_eq!(e.materialize().to_plain(), "aabaaabaaababa");
        assert_eq!(e.len(), e.materialize().len());
        assert_eq!(e.count(Letter::B), e.materialize().count(Letter::B));
        let a: TropMatrix = "0 1; -inf 2".parse().unwrap();
        let b: TropMatrix = "-1 -inf; 3 0".parse().unwrap();
        assert_eq!(e.eval(&a, &b), evaluate(&e.materialize(), &a, &b).unwrap());
    }
}
