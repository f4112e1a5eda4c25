//! The weighted digraph of a square matrix and the walk/cycle machinery on it.
//!
//! Nodes are matrix indices (0-based); the arc `i -> j` exists iff `A[i][j]`
//! is finite and carries that weight.

mod scc;
mod spectral;
mod walks;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::matrix::TropMatrix;
use crate::scalar::{Rational, TropScalar};

pub use scc::{cyclicity, scc_decompose};
pub use spectral::{
    critical_graph, cycle_weight, kleene_star, simple_cycles, spectral_radius, spectral_radius_by_cycles,
    spectral_radius_karp, CriticalGraph, CYCLE_ENUMERATION_MAX,
};
pub use walks::{max_weight_walk, restricted_walk_optimum, witness_cycle, RESTRICTED_WALK_MAX};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDigraph {
    node_count: usize,
    succ: Vec<Vec<(usize, Rational)>>,
}

impl WeightedDigraph {
    pub fn from_matrix(a: &TropMatrix) -> Result<Self> {
        let n = a.order("digraph")?;
        let mut succ = vec![Vec::new(); n];
        for (i, j, w) in a.finite_entries() {
            succ[i].push((j, w.finite().unwrap()));
        }
        Ok(WeightedDigraph { node_count: n, succ })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Successors of `i` in increasing index order.
    pub fn successors(&self, i: usize) -> &[(usize, Rational)] {
        &self.succ[i]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, Rational)> + '_ {
        self.succ.iter().enumerate().flat_map(|(i, s)| s.iter().map(move |&(j, w)| (i, j, w)))
    }

    pub fn arc_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<Rational> {
        self.succ[i].iter().find(|&&(k, _)| k == j).map(|&(_, w)| w)
    }

    pub fn to_matrix(&self) -> TropMatrix {
        let mut m = TropMatrix::bottom(self.node_count, self.node_count);
        for (i, j, w) in self.arcs() {
            m.set(i, j, TropScalar::Finite(w));
        }
        m
    }

    /// Graphviz rendering, for debugging and documentation only.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.node_count {
            let _ = writeln!(out, "  {v};");
        }
        for (i, j, w) in self.arcs() {
            let _ = writeln!(out, "  {i} -> {j} [label=\"{}\"];", TropScalar::Finite(w));
        }
        out.push_str("}\n");
        out
    }
}

/// A walk together with its weight and length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WalkWitness {
    pub node_sequence: Vec<usize>,
    pub weight: TropScalar,
    pub length: usize,
}

impl WalkWitness {
    /// Checks that consecutive nodes are arcs of `a` and the recorded weight
    /// and length match.
    pub fn is_valid_for(&self, a: &TropMatrix) -> bool {
        if self.node_sequence.is_empty() || self.node_sequence.len() != self.length + 1 {
            return false;
        }
        let mut w = TropScalar::UNIT;
        for pair in self.node_sequence.windows(2) {
            let x = a.get(pair[0], pair[1]);
            if x.is_bottom() {
                return false;
            }
            w = w + x;
        }
        w == self.weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcs_match_finite_entries() {
        let a: TropMatrix = "0 -inf 2; -inf -inf 1; 3 -inf -inf".parse().unwrap();
        let g = WeightedDigraph::from_matrix(&a).unwrap();
        assert_eq!(g.arc_count(), 4);
        assert_eq!(g.to_matrix(), a);
        assert_eq!(g.weight(0, 2), Some(Rational::from_integer(2)));
        assert_eq!(g.weight(1, 0), None);
        let dot = g.to_dot();
        assert!(dot.contains("2 -> 0 [label=\"3\"]"));
    }
}
