//! CSR terms of a matrix, the weak CSR expansion of its powers, and the two
//! constructive bounds on the factor rank of large powers built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{critical_graph, cyclicity, kleene_star, scc_decompose, witness_cycle, CriticalGraph, WeightedDigraph};
use crate::matrix::TropMatrix;
use crate::permanent::is_nonsingular;
use crate::ranks::{rank_one_sum_bound, tropical_rank};
use crate::scalar::{lcm_upto, TropScalar};

/// `(n-1)^2 + 1`, from which on the weak CSR expansion holds.
pub fn weak_csr_threshold(n: usize) -> u64 {
    let m = n as u64 - 1;
    m * m + 1
}

/// `3n - 2`, from which on the singular power decomposition holds.
pub fn singular_threshold(n: usize) -> u64 {
    3 * n as u64 - 2
}

/// A set of arcs and the nodes they touch.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub nodes: Vec<usize>,
    pub arcs: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn from_arcs(mut arcs: Vec<(usize, usize)>) -> Self {
        arcs.sort_unstable();
        arcs.dedup();
        let mut nodes: Vec<usize> = arcs.iter().flat_map(|&(i, j)| [i, j]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        Subgraph { nodes, arcs }
    }

    pub fn from_critical(g: &CriticalGraph) -> Self {
        Subgraph::from_arcs(g.arcs.clone())
    }

    /// The arcs of a simple cycle given as a node sequence.
    pub fn cycle(nodes: &[usize]) -> Self {
        let k = nodes.len();
        Subgraph::from_arcs((0..k).map(|m| (nodes[m], nodes[(m + 1) % k])).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains_node(&self, v: usize) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    pub fn contains_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.binary_search(&(i, j)).is_ok()
    }

    fn pattern(&self, n: usize) -> TropMatrix {
        let mut m = TropMatrix::bottom(n, n);
        for &(i, j) in &self.arcs {
            m.set(i, j, TropScalar::UNIT);
        }
        m
    }

    /// Cyclicity of the subgraph as a digraph on `n` nodes.
    pub fn cyclicity(&self, n: usize) -> u64 {
        cyclicity(&WeightedDigraph::from_matrix(&self.pattern(n)).unwrap())
    }

    /// Strongly connected components that carry at least one arc, ordered by
    /// their smallest node.
    pub fn components(&self, n: usize) -> Vec<Subgraph> {
        let g = WeightedDigraph::from_matrix(&self.pattern(n)).unwrap();
        let mut out = Vec::new();
        for comp in scc_decompose(&g) {
            let arcs: Vec<_> =
                self.arcs.iter().copied().filter(|&(i, j)| comp.contains(&i) && comp.contains(&j)).collect();
            if !arcs.is_empty() {
                out.push(Subgraph::from_arcs(arcs));
            }
        }
        out.sort_by_key(|c| c.nodes[0]);
        out
    }

    /// Every arc lies inside a strongly connected component of the subgraph.
    pub fn is_completely_reducible(&self, n: usize) -> bool {
        let inside: usize = self.components(n).iter().map(|c| c.arcs.len()).sum();
        inside == self.arcs.len()
    }

    /// Shortest simple cycle of every component, choosing the lexicographically
    /// smallest node sequence (starting at its minimal node) among ties.
    pub fn shortest_cycles(&self, n: usize) -> Vec<Vec<usize>> {
        self.components(n).iter().map(|c| c.shortest_cycle(n).expect("components carry a cycle")).collect()
    }

    fn shortest_cycle(&self, n: usize) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for &s in &self.nodes {
            // Distances to `s` using only nodes >= s, so `s` is the minimum.
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut frontier = vec![s];
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for &v in &frontier {
                    for &(u, w) in &self.arcs {
                        if w == v && u >= s && u != s && dist[u] == usize::MAX {
                            dist[u] = dist[v] + 1;
                            next.push(u);
                        }
                    }
                }
                frontier = next;
            }
            let len = self
                .arcs
                .iter()
                .filter(|&&(u, v)| u == s && v >= s && dist[v] != usize::MAX)
                .map(|&(_, v)| dist[v] + 1)
                .min();
            let Some(len) = len else { continue };
            if best.as_ref().is_some_and(|b| b.len() <= len) {
                continue;
            }
            let mut seq = vec![s];
            let mut cur = s;
            for remaining in (1..len).rev() {
                cur = self
                    .arcs
                    .iter()
                    .filter(|&&(u, v)| u == cur && v > s && dist[v] == remaining)
                    .map(|&(_, v)| v)
                    .min()
                    .unwrap();
                seq.push(cur);
            }
            best = Some(seq);
        }
        best
    }
}

/// The CSR terms of a matrix with respect to a subgraph of its critical graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsrTerms {
    pub c: TropMatrix,
    pub s: TropMatrix,
    pub r: TropMatrix,
    pub subgraph: Subgraph,
    pub cyc: u64,
    pub lambda: TropScalar,
}

impl CsrTerms {
    /// `C S^t R`.
    pub fn power_term(&self, t: u64) -> TropMatrix {
        let st = self.s.pow_by_squaring(t).unwrap();
        self.c.otimes(&st).unwrap().otimes(&self.r).unwrap()
    }

    /// `C S^t R` as a sum of rank-one terms, one per subgraph node:
    /// column `k` of `C S^t` times row `k` of `R`.
    pub fn rank_one_terms(&self, t: u64) -> Vec<(Vec<TropScalar>, Vec<TropScalar>)> {
        let cst = self.c.otimes(&self.s.pow_by_squaring(t).unwrap()).unwrap();
        self.subgraph.nodes.iter().map(|&k| (cst.col(k), self.r.row(k).to_vec())).collect()
    }
}

/// CSR terms of `a` with respect to `h`, which must be a completely reducible
/// subgraph of the critical graph (or empty).
pub fn csr_terms(a: &TropMatrix, h: &Subgraph) -> Result<CsrTerms> {
    let n = a.order("csr_terms")?;
    let crit = critical_graph(a)?;
    if let Some(&(i, j)) = h.arcs.iter().find(|&&(i, j)| !crit.contains_arc(i, j)) {
        return Err(Error::InvalidSubgraph(format!("arc ({i}, {j}) is not critical")));
    }
    if !h.is_completely_reducible(n) {
        return Err(Error::InvalidSubgraph("some arc lies on no cycle of the subgraph".into()));
    }
    let lambda = crit.lambda;
    let (TropScalar::Finite(l), false) = (lambda, h.is_empty()) else {
        let z = TropMatrix::bottom(n, n);
        return Ok(CsrTerms { c: z.clone(), s: z.clone(), r: z, subgraph: h.clone(), cyc: 1, lambda });
    };
    let cyc = h.cyclicity(n);
    let m = kleene_star(&a.shift(TropScalar::Finite(-l)).pow(cyc)?)?;
    let c = TropMatrix::from_fn(n, n, |i, j| if h.contains_node(j) { m.get(i, j) } else { TropScalar::BOTTOM });
    let s = TropMatrix::from_fn(n, n, |i, j| if h.contains_arc(i, j) { a.get(i, j) } else { TropScalar::BOTTOM });
    let r = TropMatrix::from_fn(n, n, |i, j| if h.contains_node(i) { m.get(i, j) } else { TropScalar::BOTTOM });
    Ok(CsrTerms { c, s, r, subgraph: h.clone(), cyc, lambda })
}

/// Bottom out every row and column of a critical node.
pub fn nachtigall_reduce(a: &TropMatrix) -> Result<TropMatrix> {
    let crit = critical_graph(a)?;
    Ok(reduce_by(a, &crit))
}

fn reduce_by(a: &TropMatrix, crit: &CriticalGraph) -> TropMatrix {
    let n = a.rows();
    TropMatrix::from_fn(n, n, |i, j| {
        if crit.is_critical_node(i) || crit.is_critical_node(j) {
            TropScalar::BOTTOM
        } else {
            a.get(i, j)
        }
    })
}

/// The two sides of the weak CSR expansion: CSR terms for the full critical
/// graph and the Nachtigall reduction.
#[derive(Clone, Debug)]
pub struct WeakCsr {
    pub terms: CsrTerms,
    pub reduced: TropMatrix,
}

impl WeakCsr {
    pub fn new(a: &TropMatrix) -> Result<Self> {
        let crit = critical_graph(a)?;
        let terms = csr_terms(a, &Subgraph::from_critical(&crit))?;
        Ok(WeakCsr { terms, reduced: reduce_by(a, &crit) })
    }

    /// `C S^t R ∨ B[A]^t`.
    pub fn expansion(&self, t: u64) -> TropMatrix {
        self.terms.power_term(t).oplus(&self.reduced.pow_by_squaring(t).unwrap()).unwrap()
    }
}

/// Compares `A^t` with its weak CSR expansion; returns the first differing
/// entry, or `None` when they agree.
pub fn weak_csr_verify(a: &TropMatrix, t: u64) -> Result<Option<(usize, usize)>> {
    a.order("weak_csr_verify")?;
    let csr = WeakCsr::new(a)?;
    Ok(a.pow(t)?.first_difference(&csr.expansion(t)))
}

/// A cycle of the nested expansion and the reduction level that owns it
/// (level 0 is the matrix itself).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCycle {
    pub nodes: Vec<usize>,
    pub level: usize,
}

/// Node-disjoint cycles whose CSR terms add up to `A^t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCertificate {
    pub t: u64,
    pub cycles: Vec<CertificateCycle>,
    pub terms: Vec<CsrTerms>,
    pub sum_of_lengths: usize,
    pub reconstruction_ok: bool,
}

impl FactorCertificate {
    fn from_parts(t: u64, parts: Vec<(CertificateCycle, CsrTerms)>, reconstruction_ok: bool) -> Self {
        let sum_of_lengths = parts.iter().map(|(c, _)| c.nodes.len()).sum();
        let (cycles, terms) = parts.into_iter().unzip();
        FactorCertificate { t, cycles, terms, sum_of_lengths, reconstruction_ok }
    }

    /// `⋁ C_θ S_θ^t R_θ`.
    pub fn reconstruct(&self, n: usize) -> TropMatrix {
        self.terms
            .iter()
            .fold(TropMatrix::bottom(n, n), |acc, term| acc.oplus(&term.power_term(self.t)).unwrap())
    }

    /// One rank-one term per certificate node; as many as `sum_of_lengths`.
    pub fn rank_one_terms(&self) -> Vec<(Vec<TropScalar>, Vec<TropScalar>)> {
        self.terms.iter().flat_map(|term| term.rank_one_terms(self.t)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

fn check_reconstruction(context: &'static str, expected: &TropMatrix, found: &TropMatrix) -> Result<()> {
    match found.first_difference(expected) {
        None => Ok(()),
        Some((i, j)) => Err(Error::ReconstructionFailure {
            context,
            i,
            j,
            expected: expected.get(i, j),
            found: found.get(i, j),
        }),
    }
}

/// Repeatedly applies the weak CSR expansion to the Nachtigall reductions
/// `A_0 = A, A_{k+1} = B[A_k]` until the graph is acyclic, keeping one
/// shortest cycle per component of every critical graph.
pub fn nested_csr_expansion(a: &TropMatrix, t: u64) -> Result<FactorCertificate> {
    let n = a.order("nested_csr_expansion")?;
    let threshold = weak_csr_threshold(n);
    if t < threshold {
        return Err(Error::BelowThreshold { t, threshold });
    }
    let mut parts = Vec::new();
    let mut current = a.clone();
    for level in 0.. {
        let crit = critical_graph(&current)?;
        if crit.arcs.is_empty() {
            break;
        }
        for cycle in Subgraph::from_critical(&crit).shortest_cycles(n) {
            let terms = csr_terms(&current, &Subgraph::cycle(&cycle))?;
            parts.push((CertificateCycle { nodes: cycle, level }, terms));
        }
        current = reduce_by(&current, &crit);
    }
    let cert = FactorCertificate::from_parts(t, parts, true);
    check_reconstruction("nested_csr_expansion", &a.pow(t)?, &cert.reconstruct(n))?;
    Ok(cert)
}

/// Greedily drops cycles whose removal keeps the reconstruction exact, trying
/// higher levels first, then longer cycles, then lexicographic order. A cycle
/// that cannot be dropped from a set cannot be dropped from any subset, so
/// one pass suffices. The result must satisfy `sum of lengths <= rk_tr(A)`.
pub fn minimize_certificate(cert: &FactorCertificate, a: &TropMatrix) -> Result<FactorCertificate> {
    let n = a.order("minimize_certificate")?;
    if !cert.reconstruction_ok {
        return Err(Error::Precondition("certificate does not reconstruct its power".into()));
    }
    let target = a.pow(cert.t)?;
    check_reconstruction("minimize_certificate", &target, &cert.reconstruct(n))?;
    let products: Vec<TropMatrix> = cert.terms.iter().map(|term| term.power_term(cert.t)).collect();
    let mut order: Vec<usize> = (0..cert.cycles.len()).collect();
    order.sort_by(|&x, &y| {
        let (cx, cy) = (&cert.cycles[x], &cert.cycles[y]);
        cy.level.cmp(&cx.level).then(cy.nodes.len().cmp(&cx.nodes.len())).then(cx.nodes.cmp(&cy.nodes))
    });
    let mut keep = vec![true; products.len()];
    for &x in &order {
        keep[x] = false;
        let rest = (0..products.len())
            .filter(|&y| keep[y])
            .fold(TropMatrix::bottom(n, n), |acc, y| acc.oplus(&products[y]).unwrap());
        if rest != target {
            keep[x] = true;
        }
    }
    let parts = cert
        .cycles
        .iter()
        .cloned()
        .zip(cert.terms.iter().cloned())
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(p, _)| p)
        .collect();
    let out = FactorCertificate::from_parts(cert.t, parts, true);
    let rank = tropical_rank(a)?.value;
    if out.sum_of_lengths > rank {
        return Err(Error::BoundViolated { sum: out.sum_of_lengths, rank });
    }
    rank_one_sum_bound(&out.rank_one_terms(), &target)?;
    Ok(out)
}

/// `B^t` for `B = A^n̄` written as `n - 1` rank-one terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPowerDecomposition {
    pub b: TropMatrix,
    pub t: u64,
    /// The witness cycle of `B` against the identity permutation, if any.
    pub cycle: Option<Vec<usize>>,
    pub excluded_node: usize,
    /// Column `h` of `B^n` and row `h` of `B^(t-n)`, for every `h` except the
    /// excluded node, in increasing `h`.
    pub terms: Vec<(Vec<TropScalar>, Vec<TropScalar>)>,
}

/// For singular `B = A^n̄` and `t >= 3n - 2`, writes `B^t` as a sum of `n - 1`
/// rank-one matrices.
pub fn singular_power_decomposition(a: &TropMatrix, t: u64) -> Result<SingularPowerDecomposition> {
    let n = a.order("singular_power_decomposition")?;
    let threshold = singular_threshold(n);
    if t < threshold {
        return Err(Error::BelowThreshold { t, threshold });
    }
    let b = a.pow(lcm_upto(n as u64))?;
    if is_nonsingular(&b)? {
        return Err(Error::Precondition(format!("A^{} is nonsingular", lcm_upto(n as u64))));
    }
    let identity: Vec<usize> = (0..n).collect();
    let cycle = witness_cycle(&b, &identity)?;
    // A node without a loop is a valid choice too: the walks of the proof
    // spend their middle stretch on a loop, so they never sit at such a node.
    let excluded_node = match &cycle {
        Some(theta) => *theta.iter().min_by_key(|&&v| (b.get(v, v), v)).unwrap(),
        None => (0..n)
            .find(|&v| b.get(v, v).is_bottom())
            .ok_or_else(|| Error::Precondition("singular power without a witness cycle or loopless node".into()))?,
    };
    let bn = b.pow(n as u64)?;
    let rest = b.pow(t - n as u64)?;
    let terms: Vec<_> = (0..n).filter(|&h| h != excluded_node).map(|h| (bn.col(h), rest.row(h).to_vec())).collect();
    let target = b.pow(t)?;
    let sum = terms.iter().fold(TropMatrix::bottom(n, n), |acc, (c, r)| acc.oplus(&TropMatrix::outer(c, r)).unwrap());
    check_reconstruction("singular_power_decomposition", &target, &sum)?;
    Ok(SingularPowerDecomposition { b, t, cycle, excluded_node, terms })
}

/// Best weight of a walk from `i` to `j` that visits a node of `through` and
/// has length congruent to `t` mod `p`, over lengths up to
/// `(n-1)^2 + 1 + n p`. Requires `λ(A) = 0`.
pub fn csr_walk_value(
    a: &TropMatrix,
    h: &Subgraph,
    i: usize,
    j: usize,
    t: u64,
    p: u64,
    through: &[usize],
) -> Result<TropScalar> {
    let n = a.order("csr_walk_value")?;
    let lambda = critical_graph(a)?.lambda;
    if lambda != TropScalar::UNIT {
        return Err(Error::Precondition(format!("spectral radius is {lambda}, expected 0")));
    }
    if i >= n || j >= n {
        return Err(Error::Precondition(format!("node out of range for {n} nodes")));
    }
    if p == 0 || !p.is_multiple_of(h.cyclicity(n)) {
        return Err(Error::Precondition(format!("p = {p} is not a multiple of the subgraph cyclicity")));
    }
    if through.iter().any(|&v| !h.contains_node(v)) {
        return Err(Error::Precondition("node set leaves the subgraph".into()));
    }
    if h.components(n).iter().any(|c| !through.iter().any(|&v| c.contains_node(v))) {
        return Err(Error::Precondition("node set misses a component of the subgraph".into()));
    }
    let cap = weak_csr_threshold(n) + n as u64 * p;
    let in_set: Vec<bool> = (0..n).map(|v| through.contains(&v)).collect();
    // cur[flag * n + v]: heaviest walk from i to v of the current length,
    // flag recording whether the walk has met `through`.
    let mut cur = vec![TropScalar::BOTTOM; 2 * n];
    cur[usize::from(in_set[i]) * n + i] = TropScalar::UNIT;
    let mut best = TropScalar::BOTTOM;
    for len in 0..=cap {
        if len % p == t % p {
            best = best.max(cur[n + j]);
        }
        let mut next = vec![TropScalar::BOTTOM; 2 * n];
        for flag in 0..2 {
            for u in 0..n {
                let here = cur[flag * n + u];
                if here.is_bottom() {
                    continue;
                }
                for v in 0..n {
                    let cand = here + a.get(u, v);
                    let f = flag.max(usize::from(in_set[v]));
                    if cand > next[f * n + v] {
                        next[f * n + v] = cand;
                    }
                }
            }
        }
        cur = next;
    }
    Ok(best)
}
