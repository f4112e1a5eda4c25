mod common;

use common::{matrix, matrix_of};
use proptest::prelude::*;
use tropid_core::graph::{
    critical_graph, cyclicity, kleene_star, restricted_walk_optimum, scc_decompose, spectral_radius_by_cycles,
    spectral_radius_karp, WeightedDigraph,
};
use tropid_core::{lcm_upto, TropMatrix, TropScalar};

fn normalized(a: &TropMatrix) -> TropMatrix {
    match critical_graph(a).unwrap().lambda {
        TropScalar::Finite(l) => a.shift(TropScalar::Finite(-l)),
        TropScalar::Bottom => a.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn critical_graph_of_powers(a in matrix(1..=5)) {
        let n = a.rows() as u64;
        let crit = critical_graph(&a).unwrap();
        for t in [2, 3, lcm_upto(n)] {
            let at = a.pow(t).unwrap();
            let crit_t = critical_graph(&at).unwrap();
            prop_assert_eq!(crit_t.matrix(&at), crit.matrix(&a).pow(t).unwrap(), "t = {}", t);
            prop_assert_eq!(crit_t.lambda, crit.lambda.scale(t as i64));
        }
    }

    #[test]
    fn aligned_power_has_critical_loops(a in matrix(1..=5)) {
        let b = a.pow(lcm_upto(a.rows() as u64)).unwrap();
        let (ca, cb) = (critical_graph(&a).unwrap(), critical_graph(&b).unwrap());
        prop_assert_eq!(&ca.critical_nodes, &cb.critical_nodes);
        for &v in &cb.critical_nodes {
            prop_assert!(cb.contains_arc(v, v), "no loop at {}", v);
        }
    }

    #[test]
    fn restricted_walks_reach_powers(a in matrix(1..=4), extra in 0u64..=6) {
        let n = a.rows();
        let b = a.pow(lcm_upto(n as u64)).unwrap();
        let t = 2 * n as u64 - 2 + extra;
        let bt = b.pow(t).unwrap();
        for i in 0..n {
            for j in 0..n {
                if bt.get(i, j).is_finite() {
                    prop_assert_eq!(restricted_walk_optimum(&b, i, j, t).unwrap(), bt.get(i, j), "({}, {})", i, j);
                }
            }
        }
    }

    #[test]
    fn kleene_star_is_truncated_supremum(a in matrix(1..=5)) {
        let z = normalized(&a);
        let n = z.rows();
        let mut sup = TropMatrix::identity(n);
        let mut pk = TropMatrix::identity(n);
        for _ in 0..2 * n {
            pk = pk.otimes(&z).unwrap();
            sup = sup.oplus(&pk).unwrap();
        }
        prop_assert_eq!(kleene_star(&z).unwrap(), sup);
    }

    #[test]
    fn spectral_radius_methods_agree(a in matrix(1..=6)) {
        prop_assert_eq!(spectral_radius_by_cycles(&a).unwrap(), spectral_radius_karp(&a).unwrap());
    }

    #[test]
    fn walk_lengths_respect_cyclicity(
        (n, a) in (2usize..=5).prop_flat_map(|n| (Just(n), matrix_of(n, 0.6)))
    ) {
        let g = WeightedDigraph::from_matrix(&a).unwrap();
        prop_assume!(scc_decompose(&g).len() == 1 && g.arc_count() > 0);
        let cyc = cyclicity(&g);
        let mut class = vec![None; n * n];
        let mut pt = a.clone();
        for t in 1..=3 * n * n {
            for (i, j, _) in pt.finite_entries() {
                let r = t as u64 % cyc;
                let seen = class[i * n + j].get_or_insert(r);
                prop_assert_eq!(*seen, r, "({}, {}) at length {}", i, j, t);
            }
            pt = pt.otimes(&a).unwrap();
        }
    }
}
