use std::ops::ControlFlow;

use serde::Serialize;

use super::scc::{component_of, scc_decompose};
use super::WeightedDigraph;
use crate::error::{Error, Result};
use crate::matrix::TropMatrix;
use crate::scalar::{Rational, TropScalar};

/// Largest order for which the spectral radius is found by listing cycles.
pub const CYCLE_ENUMERATION_MAX: usize = 8;

/// Weight of the closed walk `cycle[0] -> cycle[1] -> ... -> cycle[0]`.
pub fn cycle_weight(a: &TropMatrix, cycle: &[usize]) -> TropScalar {
    let k = cycle.len();
    (0..k).fold(TropScalar::UNIT, |acc, m| acc + a.get(cycle[m], cycle[(m + 1) % k]))
}

/// Visits every simple cycle of `G(a)` once, as a node sequence starting at
/// its smallest node, in lexicographic order of those sequences. The visitor
/// may stop the enumeration early.
pub fn simple_cycles<B>(a: &TropMatrix, mut visit: impl FnMut(&[usize], TropScalar) -> ControlFlow<B>) -> Option<B> {
    let n = a.rows();
    let mut path = Vec::with_capacity(n);
    let mut on_path = vec![false; n];
    for start in 0..n {
        path.push(start);
        on_path[start] = true;
        let flow = extend(a, start, &mut path, &mut on_path, TropScalar::UNIT, &mut visit);
        path.pop();
        on_path[start] = false;
        if let ControlFlow::Break(b) = flow {
            return Some(b);
        }
    }
    None
}

fn extend<B>(
    a: &TropMatrix,
    start: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    weight: TropScalar,
    visit: &mut impl FnMut(&[usize], TropScalar) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let last = *path.last().unwrap();
    let closing = a.get(last, start);
    if closing.is_finite() {
        visit(path, weight + closing)?;
    }
    for next in start + 1..a.cols() {
        let w = a.get(last, next);
        if on_path[next] || w.is_bottom() {
            continue;
        }
        path.push(next);
        on_path[next] = true;
        let flow = extend(a, start, path, on_path, weight + w, visit);
        path.pop();
        on_path[next] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

/// Maximal cycle mean; bottom for an acyclic graph.
pub fn spectral_radius(a: &TropMatrix) -> Result<TropScalar> {
    let n = a.order("spectral_radius")?;
    if n <= CYCLE_ENUMERATION_MAX {
        spectral_radius_by_cycles(a)
    } else {
        spectral_radius_karp(a)
    }
}

/// Spectral radius as the best mean over all simple cycles.
pub fn spectral_radius_by_cycles(a: &TropMatrix) -> Result<TropScalar> {
    a.order("spectral_radius")?;
    let mut best = TropScalar::BOTTOM;
    simple_cycles::<()>(a, |cycle, w| {
        best = best.max(w.div_int(cycle.len() as i64));
        ControlFlow::Continue(())
    });
    Ok(best)
}

/// Spectral radius by Karp's characterization, applied per strongly
/// connected component.
pub fn spectral_radius_karp(a: &TropMatrix) -> Result<TropScalar> {
    let g = WeightedDigraph::from_matrix(a)?;
    let comps = scc_decompose(&g);
    let comp = component_of(&g, &comps);
    let mut best = TropScalar::BOTTOM;
    for (c, nodes) in comps.iter().enumerate() {
        let m = nodes.len();
        let has_cycle = m > 1 || g.weight(nodes[0], nodes[0]).is_some();
        if !has_cycle {
            continue;
        }
        let mut local = vec![usize::MAX; g.node_count()];
        for (k, &v) in nodes.iter().enumerate() {
            local[v] = k;
        }
        // d[k][v]: heaviest walk of length k from nodes[0] to v inside the component.
        let mut d = vec![vec![None::<Rational>; m]; m + 1];
        d[0][0] = Some(Rational::from_integer(0));
        for k in 1..=m {
            for &u in nodes {
                let Some(du) = d[k - 1][local[u]] else { continue };
                for &(v, w) in g.successors(u) {
                    if comp[v] != c {
                        continue;
                    }
                    let cand = du + w;
                    let slot = &mut d[k][local[v]];
                    if slot.is_none_or(|s| cand > s) {
                        *slot = Some(cand);
                    }
                }
            }
        }
        for v in 0..m {
            let Some(dm) = d[m][v] else { continue };
            let worst = (0..m)
                .filter_map(|k| d[k][v].map(|dk| (dm - dk) / Rational::from_integer((m - k) as i64)))
                .min();
            if let Some(x) = worst {
                best = best.max(TropScalar::Finite(x));
            }
        }
    }
    Ok(best)
}

/// Union of all cycles of maximal mean weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalGraph {
    pub node_count: usize,
    pub lambda: TropScalar,
    /// Critical arcs in row-major order.
    pub arcs: Vec<(usize, usize)>,
    pub critical_nodes: Vec<usize>,
}

impl CriticalGraph {
    pub fn contains_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.binary_search(&(i, j)).is_ok()
    }

    pub fn is_critical_node(&self, v: usize) -> bool {
        self.critical_nodes.binary_search(&v).is_ok()
    }

    /// `a` restricted to the critical arcs, bottom elsewhere.
    pub fn matrix(&self, a: &TropMatrix) -> TropMatrix {
        let mut m = TropMatrix::bottom(self.node_count, self.node_count);
        for &(i, j) in &self.arcs {
            m.set(i, j, a.get(i, j));
        }
        m
    }

    /// Boolean adjacency of the critical arcs, as a 0/-inf matrix.
    pub fn pattern(&self) -> TropMatrix {
        let mut m = TropMatrix::bottom(self.node_count, self.node_count);
        for &(i, j) in &self.arcs {
            m.set(i, j, TropScalar::UNIT);
        }
        m
    }
}

/// The critical graph. An arc `(i, j)` is critical iff, after normalizing by
/// the spectral radius, its weight plus the heaviest walk back from `j` to
/// `i` is zero.
pub fn critical_graph(a: &TropMatrix) -> Result<CriticalGraph> {
    let n = a.order("critical_graph")?;
    let lambda = spectral_radius(a)?;
    let mut arcs = Vec::new();
    if let TropScalar::Finite(l) = lambda {
        let normalized = a.shift(TropScalar::Finite(-l));
        let star = kleene_star(&normalized)?;
        for (i, j, w) in normalized.finite_entries() {
            if w + star.get(j, i) == TropScalar::UNIT {
                arcs.push((i, j));
            }
        }
    }
    let mut critical_nodes: Vec<usize> = arcs.iter().flat_map(|&(i, j)| [i, j]).collect();
    critical_nodes.sort_unstable();
    critical_nodes.dedup();
    Ok(CriticalGraph { node_count: n, lambda, arcs, critical_nodes })
}

/// `A* = I ∨ A ∨ A^2 ∨ ...`, by a longest-path closure. Diverges iff some
/// cycle has positive weight.
pub fn kleene_star(a: &TropMatrix) -> Result<TropMatrix> {
    let n = a.order("kleene_star")?;
    let mut g: Vec<TropScalar> = a.entries().to_vec();
    for k in 0..n {
        for i in 0..n {
            let gik = g[i * n + k];
            if gik.is_bottom() {
                continue;
            }
            for j in 0..n {
                let cand = gik + g[k * n + j];
                if cand > g[i * n + j] {
                    g[i * n + j] = cand;
                }
            }
        }
        if (0..n).any(|i| g[i * n + i] > TropScalar::UNIT) {
            return Err(Error::KleeneDivergence { lambda: spectral_radius(a)? });
        }
    }
    for i in 0..n {
        g[i * n + i] = g[i * n + i].max(TropScalar::UNIT);
    }
    TropMatrix::new(n, n, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> TropMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn radius_examples() {
        assert_eq!(spectral_radius(&m("3")).unwrap(), TropScalar::int(3));
        assert_eq!(spectral_radius(&m("-inf 1; 3 -inf")).unwrap(), TropScalar::int(2));
        assert_eq!(spectral_radius(&m("-inf 5; -inf -inf")).unwrap(), TropScalar::BOTTOM);
        for s in ["3", "-inf 1; 3 -inf", "-inf 5; -inf -inf", "0 1 -inf; -inf -inf 2; -1 -inf 4"] {
            assert_eq!(spectral_radius_karp(&m(s)).unwrap(), spectral_radius_by_cycles(&m(s)).unwrap());
        }
        assert_eq!(spectral_radius(&m("-inf 1; 2 -inf")).unwrap(), TropScalar::ratio(3, 2));
    }

    #[test]
    fn cycles_in_lexicographic_order() {
        let a = TropMatrix::from_fn(3, 3, |_, _| TropScalar::UNIT);
        let mut seen = Vec::new();
        simple_cycles::<()>(&a, |c, _| {
            seen.push(c.to_vec());
            ControlFlow::Continue(())
        });
        let expected: Vec<Vec<usize>> =
            vec![vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 2], vec![0, 2, 1], vec![1], vec![1, 2], vec![2]];
        assert_eq!(seen, expected);
    }

    #[test]
    fn critical_examples() {
        let c = critical_graph(&m("0 -inf; -inf -1")).unwrap();
        assert_eq!(c.arcs, vec![(0, 0)]);
        assert_eq!(c.critical_nodes, vec![0]);
        let c = critical_graph(&m("-inf 1; 3 -inf")).unwrap();
        assert_eq!(c.arcs, vec![(0, 1), (1, 0)]);
        let c = critical_graph(&m("-inf 5; -inf -inf")).unwrap();
        assert!(c.arcs.is_empty() && c.critical_nodes.is_empty());
    }

    #[test]
    fn star_examples() {
        assert_eq!(kleene_star(&TropMatrix::bottom(3, 3)).unwrap(), TropMatrix::identity(3));
        assert_eq!(kleene_star(&m("-inf 1; -inf -inf")).unwrap(), m("0 1; -inf 0"));
        assert!(matches!(kleene_star(&m("1")), Err(Error::KleeneDivergence { .. })));
        assert_eq!(kleene_star(&m("-1 2; -3 -inf")).unwrap(), m("0 2; -3 0"));
    }
}
