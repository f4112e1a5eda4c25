#![allow(dead_code)]

use proptest::prelude::*;
use tropid_core::{Letter, TropMatrix, Word};

/// An integer entry in `[-10, 10]`, bottom with probability about `mass`.
pub fn entry(mass: f64) -> impl Strategy<Value = Option<i64>> {
    let w = (mass * 100.0).round() as u32;
    prop_oneof![100 - w => (-10i64..=10).prop_map(Some), w => Just(None)]
}

pub fn matrix_of(n: usize, mass: f64) -> impl Strategy<Value = TropMatrix> {
    prop::collection::vec(entry(mass), n * n).prop_map(move |v| {
        let rows: Vec<Vec<Option<i64>>> = v.chunks(n).map(<[_]>::to_vec).collect();
        TropMatrix::from_ints(&rows).unwrap()
    })
}

pub fn rect_of(rows: usize, cols: usize, mass: f64) -> impl Strategy<Value = TropMatrix> {
    prop::collection::vec(entry(mass), rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<Option<i64>>> = v.chunks(cols).map(<[_]>::to_vec).collect();
        TropMatrix::from_ints(&rows).unwrap()
    })
}

/// A square matrix of order in `sizes`, with bottom mass 0, 0.3 or 0.6.
pub fn matrix(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = TropMatrix> {
    (sizes, prop_oneof![Just(0.0), Just(0.3), Just(0.6)]).prop_flat_map(|(n, mass)| matrix_of(n, mass))
}

pub fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 1..=max_len).prop_map(|bits| {
        Word::from_runs(bits.into_iter().map(|b| (if b { Letter::A } else { Letter::B }, 1))).unwrap()
    })
}

pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn go(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(k + 1, p, out);
            p.swap(k, i);
        }
    }
    go(0, &mut p, &mut out);
    out
}
