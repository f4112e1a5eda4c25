use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Identity, Monoid};
use crate::error::{Error, Result};
use crate::gen::{random_matrix, random_upper_triangular, trial_rng, EntryDist};
use crate::matrix::TropMatrix;
use crate::scalar::TropScalar;
use crate::words::{evaluate, Word};

/// Sampling plan for [`falsify`] and [`try_separate`]. Trial `k` draws
/// entries uniform in `[low, high]` with bottom mass
/// `bottom_masses[k % len]`, from a generator keyed by `(seed, k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FalsifyConfig {
    pub trials: u64,
    pub seed: u64,
    pub low: i64,
    pub high: i64,
    pub bottom_masses: Vec<f64>,
}

impl Default for FalsifyConfig {
    fn default() -> Self {
        FalsifyConfig { trials: 10_000, seed: 0, low: -10, high: 10, bottom_masses: vec![0.0, 0.3] }
    }
}

impl FalsifyConfig {
    fn dist(&self, trial: u64) -> EntryDist {
        let masses = if self.bottom_masses.is_empty() { &[0.0][..] } else { &self.bottom_masses[..] };
        EntryDist { low: self.low, high: self.high, bottom_mass: masses[(trial % masses.len() as u64) as usize] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub a: TropMatrix,
    pub b: TropMatrix,
    pub i: usize,
    pub j: usize,
    pub u_value: TropScalar,
    pub v_value: TropScalar,
}

fn sample_pair(monoid: Monoid, config: &FalsifyConfig, trial: u64) -> (TropMatrix, TropMatrix) {
    let mut rng = trial_rng(config.seed, trial);
    let dist = config.dist(trial);
    let n = monoid.n();
    if monoid.is_triangular() {
        (random_upper_triangular(&mut rng, n, &dist), random_upper_triangular(&mut rng, n, &dist))
    } else {
        (random_matrix(&mut rng, n, n, &dist), random_matrix(&mut rng, n, n, &dist))
    }
}

/// Searches for a pair of matrices from `monoid` on which the two sides
/// differ. The reported counterexample is the one with the smallest trial
/// index, whatever the scheduling.
pub fn falsify(id: &Identity, monoid: Monoid, config: &FalsifyConfig) -> Option<Counterexample> {
    let (u, v) = id.sides();
    (0..config.trials).into_par_iter().find_map_first(|trial| {
        let (a, b) = sample_pair(monoid, config, trial);
        let mu = u.eval(&a, &b);
        let mv = v.eval(&a, &b);
        let (i, j) = mu.first_difference(&mv)?;
        Some(Counterexample { trial, i, j, u_value: mu.get(i, j), v_value: mv.get(i, j), a, b })
    })
}

/// A max-plus automaton `(r, A, B, c)` giving `u` and `v` different weights
/// `r ⊗ w⟨A, B⟩ ⊗ c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separator {
    pub trial: u64,
    pub r: Vec<TropScalar>,
    pub a: TropMatrix,
    pub b: TropMatrix,
    pub c: Vec<TropScalar>,
    pub u_weight: TropScalar,
    pub v_weight: TropScalar,
}

fn automaton_weight(r: &[TropScalar], m: &TropMatrix, c: &[TropScalar]) -> TropScalar {
    m.finite_entries().map(|(i, j, x)| r[i] + x + c[j]).max().unwrap_or(TropScalar::BOTTOM)
}

/// Random search for an `n`-state automaton separating `u` from `v`.
pub fn try_separate(u: &Word, v: &Word, n: usize, config: &FalsifyConfig) -> Result<Option<Separator>> {
    if u == v {
        return Err(Error::TrivialIdentity);
    }
    if n == 0 {
        return Err(Error::InvalidShape("automata need at least one state".into()));
    }
    Ok((0..config.trials).into_par_iter().find_map_first(|trial| {
        let (a, b) = sample_pair(Monoid::Full(n), config, trial);
        let mut rng = trial_rng(config.seed ^ 0x5eed_5eed, trial);
        let finite = EntryDist { bottom_mass: 0.0, ..config.dist(trial) };
        let r = random_matrix(&mut rng, 1, n, &finite).row(0).to_vec();
        let c = random_matrix(&mut rng, 1, n, &finite).row(0).to_vec();
        let u_weight = automaton_weight(&r, &evaluate(u, &a, &b).unwrap(), &c);
        let v_weight = automaton_weight(&r, &evaluate(v, &a, &b).unwrap(), &c);
        (u_weight != v_weight).then_some(Separator { trial, r, a, b, c, u_weight, v_weight })
    }))
}
