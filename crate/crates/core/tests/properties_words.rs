mod common;

use common::{matrix_of, rect_of, word};
use proptest::prelude::*;
use tropid_core::gen::{random_pr_pair, trial_rng, EntryDist};
use tropid_core::identities::BaseLibrary;
use tropid_core::words::{
    diagonal_formula_check, occurrences, one_cyclic_optimum, perm_trace_power_check, pr_condition, substitute,
};
use tropid_core::{evaluate, permanent, lcm_upto, Letter, TropMatrix, TropScalar, Word};
use tropid_core::ranks::tropical_rank;

fn pair(max_n: usize) -> impl Strategy<Value = (TropMatrix, TropMatrix)> {
    (1usize..=max_n, prop_oneof![Just(0.0), Just(0.3)]).prop_flat_map(|(n, m)| (matrix_of(n, m), matrix_of(n, m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn equal_letters_give_powers((a, _) in pair(4), w in word(12)) {
        prop_assert_eq!(evaluate(&w, &a, &a).unwrap(), a.pow(w.len()).unwrap());
    }

    #[test]
    fn scaling_one_letter((a, b) in pair(4), w in word(12), alpha in -10i64..=10) {
        let k = occurrences(&w, Letter::A) as i64;
        let shifted = evaluate(&w, &a.shift(TropScalar::int(alpha)), &b).unwrap();
        prop_assert_eq!(shifted, evaluate(&w, &a, &b).unwrap().shift(TropScalar::int(k * alpha)));
    }

    #[test]
    fn factorization_through_a_narrow_middle(
        (p, q, b, c) in (2usize..=4).prop_flat_map(|n| (Just(n), 1..n)).prop_flat_map(|(n, k)| {
            (rect_of(n, k, 0.2), rect_of(k, n, 0.2), matrix_of(n, 0.2), matrix_of(n, 0.2))
        }),
        w in word(8),
    ) {
        let pq = p.otimes(&q).unwrap();
        let qbp = q.otimes(&b).unwrap().otimes(&p).unwrap();
        let qcp = q.otimes(&c).unwrap().otimes(&p).unwrap();
        let inner = p.otimes(&evaluate(&w, &qbp, &qcp).unwrap()).unwrap().otimes(&q).unwrap();
        let outer = evaluate(&w, &pq.otimes(&b).unwrap(), &pq.otimes(&c).unwrap()).unwrap();
        prop_assert_eq!(outer.otimes(&pq).unwrap(), inner);
        // With `a` sent to the factored matrix itself, the trailing `a` supplies that last factor.
        let wa = w.concat(&Word::letter(Letter::A));
        let qp = q.otimes(&p).unwrap();
        let left = evaluate(&wa, &pq, &pq.otimes(&c).unwrap()).unwrap();
        let right = p.otimes(&evaluate(&w, &qp, &qcp).unwrap()).unwrap().otimes(&q).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn substitution_is_a_homomorphism((a, b) in pair(3), w in word(8), u in word(5), v in word(5)) {
        let s = substitute(&w, &u, &v);
        let (ua, va) = (evaluate(&u, &a, &b).unwrap(), evaluate(&v, &a, &b).unwrap());
        prop_assert_eq!(evaluate(&s, &a, &b).unwrap(), evaluate(&w, &ua, &va).unwrap());
    }

    #[test]
    fn substitution_counts(w in word(10), u in word(6), v in word(6)) {
        let s = substitute(&w, &u, &v);
        let (wa, wb) = (occurrences(&w, Letter::A), occurrences(&w, Letter::B));
        prop_assert_eq!(s.len(), wa * u.len() + wb * v.len());
        prop_assert_eq!(occurrences(&s, Letter::A), wa * occurrences(&u, Letter::A) + wb * occurrences(&v, Letter::A));
        prop_assert_eq!(occurrences(&s, Letter::A) + occurrences(&s, Letter::B), s.len());
        prop_assert_eq!(substitute(&w, &Word::letter(Letter::A), &Word::letter(Letter::B)), w);
    }

    #[test]
    fn word_text_round_trips(w in word(40)) {
        prop_assert_eq!(w.to_plain().parse::<Word>().unwrap(), w.clone());
        prop_assert_eq!(w.to_rle().parse::<Word>().unwrap(), w);
    }

    #[test]
    fn one_cyclic_walks_never_beat_all_walks((a, b) in pair(4), w in word(8)) {
        let m = evaluate(&w, &a, &b).unwrap();
        for i in 0..a.rows() {
            for j in 0..a.rows() {
                prop_assert!(one_cyclic_optimum(&w, &a, &b, i, j).unwrap() <= m.get(i, j));
            }
        }
    }

    #[test]
    fn aligned_powers_of_full_rank_have_permanent_on_diagonal(a in (1usize..=4).prop_flat_map(|n| matrix_of(n, 0.2))) {
        prop_assert!(perm_trace_power_check(&a).unwrap());
        let p = a.pow(lcm_upto(a.rows() as u64)).unwrap();
        if tropical_rank(&p).unwrap().value == a.rows() {
            prop_assert_eq!(permanent(&p).unwrap().value, p.trace().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn pr_pairs_follow_the_diagonal_and_one_cyclic_walks(n in 1usize..=4, w in word(8), seed in any::<u64>()) {
        let Some((a, b)) = random_pr_pair(&mut trial_rng(seed, 0), n, &w, &EntryDist::default(), 50) else {
            return Ok(());
        };
        prop_assert!(diagonal_formula_check(&a, &b, &w).unwrap());
        let m = evaluate(&w, &a, &b).unwrap();
        for (i, j, x) in m.finite_entries() {
            prop_assert_eq!(one_cyclic_optimum(&w, &a, &b, i, j).unwrap(), x);
        }
    }

    #[test]
    fn triangular_identities_hold_on_full_rank_pairs(n in 2usize..=3, seed in any::<u64>()) {
        let lib = BaseLibrary::builtin();
        let id = lib.triangular(n).unwrap().identity().unwrap();
        let Some((a, b)) = random_pr_pair(&mut trial_rng(seed, 1), n, &id.u, &EntryDist::default(), 50) else {
            return Ok(());
        };
        prop_assume!(pr_condition(&a, &b, &id.v).unwrap().holds());
        prop_assert_eq!(evaluate(&id.u, &a, &b).unwrap(), evaluate(&id.v, &a, &b).unwrap());
    }
}
