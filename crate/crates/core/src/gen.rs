//! Seeded random matrices and words for tests, falsification and the
//! acceptance runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::TropMatrix;
use crate::scalar::TropScalar;
use crate::words::{pr_condition, Letter, Word};

/// Entries uniform in `[low, high]`, replaced by bottom with probability
/// `bottom_mass`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDist {
    pub low: i64,
    pub high: i64,
    pub bottom_mass: f64,
}

impl Default for EntryDist {
    fn default() -> Self {
        EntryDist { low: -10, high: 10, bottom_mass: 0.0 }
    }
}

impl EntryDist {
    pub fn with_bottom_mass(self, bottom_mass: f64) -> Self {
        EntryDist { bottom_mass, ..self }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TropScalar {
        if self.bottom_mass > 0.0 && rng.gen_bool(self.bottom_mass.min(1.0)) {
            TropScalar::BOTTOM
        } else {
            TropScalar::int(rng.gen_range(self.low..=self.high))
        }
    }
}

/// Generator for trial `index` of a run seeded with `seed`. Independent of
/// how trials are scheduled.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, dist: &EntryDist) -> TropMatrix {
    TropMatrix::from_fn(rows, cols, |_, _| dist.sample(rng))
}

/// Random matrix with bottom below the diagonal.
pub fn random_upper_triangular<R: Rng + ?Sized>(rng: &mut R, n: usize, dist: &EntryDist) -> TropMatrix {
    TropMatrix::from_fn(n, n, |i, j| if i <= j { dist.sample(rng) } else { TropScalar::BOTTOM })
}

/// Random matrix whose diagonal exceeds every other finite entry of its row
/// and column by at least one. Such a matrix has the identity as its unique
/// optimal permutation.
pub fn random_dominant<R: Rng + ?Sized>(rng: &mut R, n: usize, dist: &EntryDist) -> TropMatrix {
    let mut m = TropMatrix::from_fn(n, n, |i, j| if i == j { TropScalar::BOTTOM } else { dist.sample(rng) });
    for i in 0..n {
        let cross = (0..n).filter(|&k| k != i).flat_map(|k| [m.get(i, k), m.get(k, i)]).max();
        let d = match cross {
            Some(TropScalar::Finite(x)) => TropScalar::Finite(x) + TropScalar::int(rng.gen_range(1..=3)),
            _ => TropScalar::int(rng.gen_range(dist.low..=dist.high)),
        };
        m.set(i, i, d);
    }
    m
}

/// A diagonally dominant pair satisfying the PR condition for `w`, by
/// rejection on the rank conjunct. `None` after `max_tries` rejections.
pub fn random_pr_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    w: &Word,
    dist: &EntryDist,
    max_tries: usize,
) -> Option<(TropMatrix, TropMatrix)> {
    for _ in 0..max_tries {
        let a = random_dominant(rng, n, dist);
        let b = random_dominant(rng, n, dist);
        if pr_condition(&a, &b, w).ok()?.holds() {
            return Some((a, b));
        }
    }
    None
}

pub fn random_word<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Word {
    assert!(len >= 1);
    let letters = (0..len).map(|_| (if rng.gen_bool(0.5) { Letter::A } else { Letter::B }, 1));
    Word::from_runs(letters).unwrap()
}
