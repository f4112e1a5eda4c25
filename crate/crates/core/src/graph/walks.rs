use std::ops::ControlFlow;

use super::spectral::{cycle_weight, simple_cycles};
use super::WalkWitness;
use crate::error::{Error, Result};
use crate::matrix::TropMatrix;
use crate::scalar::TropScalar;

/// Node cap for [`restricted_walk_optimum`] (the DP runs over visited sets).
pub const RESTRICTED_WALK_MAX: usize = 12;

/// A heaviest walk of length `t` from `i` to `j`; `None` iff `(A^t)[i][j]` is
/// bottom. Ties are broken towards the smallest predecessor index.
pub fn max_weight_walk(a: &TropMatrix, i: usize, j: usize, t: usize) -> Result<Option<WalkWitness>> {
    let n = a.order("max_weight_walk")?;
    check_node(i, n)?;
    check_node(j, n)?;
    let mut layers = vec![vec![TropScalar::BOTTOM; n]];
    layers[0][i] = TropScalar::UNIT;
    let mut pred = vec![vec![usize::MAX; n]];
    for k in 1..=t {
        let prev = &layers[k - 1];
        let mut cur = vec![TropScalar::BOTTOM; n];
        let mut back = vec![usize::MAX; n];
        for u in 0..n {
            if prev[u].is_bottom() {
                continue;
            }
            for v in 0..n {
                let cand = prev[u] + a.get(u, v);
                if cand > cur[v] {
                    cur[v] = cand;
                    back[v] = u;
                }
            }
        }
        layers.push(cur);
        pred.push(back);
    }
    let weight = layers[t][j];
    if weight.is_bottom() {
        return Ok(None);
    }
    let mut nodes = vec![j];
    let mut v = j;
    for k in (1..=t).rev() {
        v = pred[k][v];
        nodes.push(v);
    }
    nodes.reverse();
    Ok(Some(WalkWitness { node_sequence: nodes, weight, length: t }))
}

fn check_node(v: usize, n: usize) -> Result<()> {
    if v >= n {
        return Err(Error::Precondition(format!("node {v} out of range for {n} nodes")));
    }
    Ok(())
}

/// Heaviest simple path from `source` to every node, indexed `[node][length]`.
/// With `reverse`, paths run from every node to `source` instead.
fn simple_path_table(b: &TropMatrix, source: usize, reverse: bool) -> Vec<Vec<TropScalar>> {
    let n = b.rows();
    let weight = |u: usize, v: usize| if reverse { b.get(v, u) } else { b.get(u, v) };
    let mut dp = vec![TropScalar::BOTTOM; n << n];
    dp[(1 << source) * n + source] = TropScalar::UNIT;
    let mut table = vec![vec![TropScalar::BOTTOM; n]; n];
    for mask in 1usize..(1 << n) {
        if mask & (1 << source) == 0 {
            continue;
        }
        let len = mask.count_ones() as usize - 1;
        for v in 0..n {
            let here = dp[mask * n + v];
            if here.is_bottom() {
                continue;
            }
            table[v][len] = table[v][len].max(here);
            for w in 0..n {
                if mask & (1 << w) != 0 {
                    continue;
                }
                let cand = here + weight(v, w);
                let slot = &mut dp[(mask | 1 << w) * n + w];
                if cand > *slot {
                    *slot = cand;
                }
            }
        }
    }
    table
}

/// Best weight over walks of length exactly `t` from `i` to `j` of the form
/// (simple path to `h`) then (the loop at `h`, `s` times) then (simple path
/// from `h`). With `s = 0` no loop is needed.
pub fn restricted_walk_optimum(b: &TropMatrix, i: usize, j: usize, t: u64) -> Result<TropScalar> {
    let n = b.order("restricted_walk_optimum")?;
    if n > RESTRICTED_WALK_MAX {
        return Err(Error::SizeCap { op: "restricted_walk_optimum", size: n, cap: RESTRICTED_WALK_MAX });
    }
    check_node(i, n)?;
    check_node(j, n)?;
    let fwd = simple_path_table(b, i, false);
    let bwd = simple_path_table(b, j, true);
    let mut best = TropScalar::BOTTOM;
    for h in 0..n {
        let lp = b.get(h, h);
        for (l1, &w1) in fwd[h].iter().enumerate() {
            if w1.is_bottom() {
                continue;
            }
            for (l2, &w2) in bwd[h].iter().enumerate() {
                let used = (l1 + l2) as u64;
                if w2.is_bottom() || used > t {
                    continue;
                }
                let s = t - used;
                let loops = if s == 0 { TropScalar::UNIT } else { lp.scale(s as i64) };
                best = best.max(w1 + w2 + loops);
            }
        }
    }
    Ok(best)
}

/// A simple cycle of `G(q)`, not a cycle of `tau`, whose weight is at least the
/// sum over its nodes of the mean weight of the `tau`-cycle through that node.
/// The lexicographically smallest such node sequence is returned; `None`
/// certifies that `q` is nonsingular with optimal permutation `tau`.
pub fn witness_cycle(q: &TropMatrix, tau: &[usize]) -> Result<Option<Vec<usize>>> {
    let n = q.order("witness_cycle")?;
    let mut seen = vec![false; n];
    if tau.len() != n || tau.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::Precondition(format!("{tau:?} is not a permutation of 0..{n}")));
    }
    let mut mu = vec![TropScalar::BOTTOM; n];
    let mut done = vec![false; n];
    for start in 0..n {
        if done[start] {
            continue;
        }
        let mut cyc = vec![start];
        let mut v = tau[start];
        while v != start {
            cyc.push(v);
            v = tau[v];
        }
        let mean = cycle_weight(q, &cyc).div_int(cyc.len() as i64);
        for &v in &cyc {
            mu[v] = mean;
            done[v] = true;
        }
    }
    let found = simple_cycles(q, |cycle, w| {
        let k = cycle.len();
        let of_tau = (0..k).all(|m| tau[cycle[m]] == cycle[(m + 1) % k]);
        let bound = cycle.iter().fold(TropScalar::UNIT, |acc, &v| acc + mu[v]);
        if !of_tau && w >= bound {
            ControlFlow::Break(cycle.to_vec())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> TropMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn walk_examples() {
        let a = m("0 1; -inf 0");
        let w = max_weight_walk(&a, 0, 0, 0).unwrap().unwrap();
        assert_eq!((w.node_sequence.clone(), w.weight, w.length), (vec![0], TropScalar::UNIT, 0));
        let w = max_weight_walk(&a, 0, 1, 2).unwrap().unwrap();
        assert_eq!(w.weight, TropScalar::int(1));
        assert!(w.is_valid_for(&a));
        for t in 1..5 {
            assert!(max_weight_walk(&a, 1, 0, t).unwrap().is_none());
        }
        assert!(max_weight_walk(&a, 0, 1, 0).unwrap().is_none());
    }

    #[test]
    fn restricted_examples() {
        let loops = m("2 -inf; -inf -3");
        assert_eq!(restricted_walk_optimum(&loops, 0, 0, 5).unwrap(), TropScalar::int(10));
        assert_eq!(restricted_walk_optimum(&loops, 1, 1, 4).unwrap(), TropScalar::int(-12));
        assert_eq!(restricted_walk_optimum(&loops, 0, 1, 4).unwrap(), TropScalar::BOTTOM);
        let b = m("0 1; -inf 0");
        assert_eq!(restricted_walk_optimum(&b, 0, 1, 3).unwrap(), TropScalar::int(1));
        assert!(matches!(
            restricted_walk_optimum(&TropMatrix::identity(13), 0, 0, 1),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn witness_examples() {
        assert_eq!(witness_cycle(&m("0 1; 1 0"), &[0, 1]).unwrap(), Some(vec![0, 1]));
        assert_eq!(witness_cycle(&TropMatrix::identity(2), &[0, 1]).unwrap(), None);
        let q = m("0 1; -1 0");
        let b = q.pow(2).unwrap();
        assert_eq!(b, q);
        assert_eq!(witness_cycle(&b, &[0, 1]).unwrap(), Some(vec![0, 1]));
        assert!(witness_cycle(&q, &[0, 0]).is_err());
    }
}
