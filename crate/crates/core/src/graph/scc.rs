use std::collections::VecDeque;

use num_integer::Integer;

use super::WeightedDigraph;

/// Strongly connected components, each sorted, listed so that every arc
/// between two components goes from an earlier one to a later one.
pub fn scc_decompose(g: &WeightedDigraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;

    // Iterative Tarjan: frames are (node, position in its successor list).
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if let Some(&(w, _)) = g.successors(v).get(frame.1) {
                frame.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    // Tarjan emits sinks first.
    comps.reverse();
    comps
}

/// Component index of every node, for the order returned by [`scc_decompose`].
pub(crate) fn component_of(g: &WeightedDigraph, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut comp = vec![0; g.node_count()];
    for (c, nodes) in comps.iter().enumerate() {
        for &v in nodes {
            comp[v] = c;
        }
    }
    comp
}

/// Gcd of cycle lengths inside each component, lcm over components.
/// Components without a cycle are skipped; a graph without cycles gives 1.
pub fn cyclicity(g: &WeightedDigraph) -> u64 {
    let comps = scc_decompose(g);
    let comp = component_of(g, &comps);
    let mut result = 1u64;
    for (c, nodes) in comps.iter().enumerate() {
        // With BFS levels from any root, the gcd of the cycle lengths is the
        // gcd of level[u] + 1 - level[v] over arcs inside the component.
        let root = nodes[0];
        let mut level = vec![usize::MAX; g.node_count()];
        level[root] = 0;
        let mut queue = VecDeque::from([root]);
        let mut period = 0u64;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in g.successors(u) {
                if comp[v] != c {
                    continue;
                }
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for &u in nodes {
            for &(v, _) in g.successors(u) {
                if comp[v] == c {
                    let diff = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs();
                    period = period.gcd(&diff);
                }
            }
        }
        if period > 0 {
            result = result.lcm(&period);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::TropMatrix;

    fn graph(s: &str) -> WeightedDigraph {
        WeightedDigraph::from_matrix(&s.parse::<TropMatrix>().unwrap()).unwrap()
    }

    #[test]
    fn components() {
        assert_eq!(scc_decompose(&graph("1")), vec![vec![0]]);
        let cycle3 = graph("-inf 0 -inf; -inf -inf 0; 0 -inf -inf");
        assert_eq!(scc_decompose(&cycle3), vec![vec![0, 1, 2]]);
        let path = graph("-inf 0 -inf; -inf -inf 0; -inf -inf -inf");
        assert_eq!(scc_decompose(&path), vec![vec![0], vec![1], vec![2]]);
        let backwards = graph("-inf -inf -inf; 0 -inf -inf; -inf 0 -inf");
        assert_eq!(scc_decompose(&backwards), vec![vec![2], vec![1], vec![0]]);
    }

    #[test]
    fn cyclicities() {
        assert_eq!(cyclicity(&graph("5")), 1);
        assert_eq!(cyclicity(&graph("-inf 0 -inf; -inf -inf 0; 0 -inf -inf")), 3);
        assert_eq!(cyclicity(&graph("0 0 -inf; -inf -inf 0; 0 -inf -inf")), 1);
        assert_eq!(cyclicity(&graph("-inf 0; -inf -inf")), 1);
        // A 2-cycle and a disjoint 3-cycle.
        let m = "-inf 0 -inf -inf -inf; 0 -inf -inf -inf -inf; -inf -inf -inf 0 -inf; \
                 -inf -inf -inf -inf 0; -inf -inf 0 -inf -inf";
        assert_eq!(cyclicity(&graph(m)), 6);
    }
}
