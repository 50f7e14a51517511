use proptest::prelude::*;

use upmax::cnf::{resolve, Resolvent};
use upmax::graphs::{
    build_cvig, build_res, build_vig, derive_partitions, detect_communities, modularity, random_partition,
    NodeKind, Representation, DEFAULT_PAIR_CAP,
};
use upmax::{Clause, Lit, MaxSatInstance, SoftClause};

fn clause(n_vars: u32) -> impl Strategy<Value = Clause> {
    let lit = (1..=n_vars as i32, any::<bool>())
        .prop_map(|(v, p)| Lit::from_dimacs(if p { v } else { -v }).unwrap());
    prop::collection::vec(lit, 1..5).prop_filter_map("tautology", |l| Clause::new(l).ok())
}

prop_compose! {
    fn instance()(n_vars in 2u32..10)
        (hard in prop::collection::vec(clause(n_vars), 0..12),
         soft in prop::collection::vec(clause(n_vars), 1..10),
         n_vars in Just(n_vars)) -> MaxSatInstance {
        let soft: Vec<SoftClause> = soft.into_iter().map(|c| SoftClause::new(c, 1)).collect();
        let top = soft.len() as u64 + 1;
        MaxSatInstance { n_vars, hard, soft, top }
    }
}

/// `inst` with all clauses reordered by `perm` (hard and soft separately).
fn permuted(inst: &MaxSatInstance, hard_perm: &[usize], soft_perm: &[usize]) -> MaxSatInstance {
    MaxSatInstance {
        hard: hard_perm.iter().map(|&i| inst.hard[i].clone()).collect(),
        soft: soft_perm.iter().map(|&i| inst.soft[i].clone()).collect(),
        ..inst.clone()
    }
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vig_total_weight_counts_wide_clauses(inst in instance()) {
        let wide = inst.clauses().filter(|c| c.len() >= 2).count();
        prop_assert!(close(build_vig(&inst).total_weight(), wide as f64));
    }

    #[test]
    fn res_edges_have_proper_resolvents(inst in instance()) {
        let g = build_res(&inst, DEFAULT_PAIR_CAP).unwrap();
        let clauses: Vec<_> = inst.clauses().collect();
        for (u, v, w) in g.edges() {
            let (a, b) = (clauses[u], clauses[v]);
            let clash: Vec<_> = a.lits().iter().filter(|&&l| b.contains(!l)).collect();
            prop_assert_eq!(clash.len(), 1);
            match resolve(a, b, clash[0].var()).unwrap() {
                Resolvent::Clause(r) => prop_assert!(close(w, 1.0 / r.len().max(1) as f64)),
                Resolvent::Tautology => prop_assert!(false, "tautological resolvent on edge {u}-{v}"),
            }
        }
    }

    #[test]
    fn graph_builds_ignore_clause_order(
        (inst, hp, sp) in instance().prop_flat_map(|i| {
            let (h, s) = (i.hard.len(), i.soft.len());
            (Just(i), perm(h), perm(s))
        })
    ) {
        let other = permuted(&inst, &hp, &sp);
        let n_hard = inst.hard.len();
        // Clause node j of `other` is clause old(j) of `inst`.
        let old = |j: usize| if j < n_hard { hp[j] } else { n_hard + sp[j - n_hard] };
        let remap = |g: &upmax::graphs::WeightedGraph, offset: usize| {
            let mut e: Vec<(usize, usize, u64)> = g
                .edges()
                .map(|(u, v, w)| {
                    let m = |x: usize| if x < offset { x } else { offset + old(x - offset) };
                    let (a, b) = (m(u), m(v));
                    (a.min(b), a.max(b), (w * 1e9).round() as u64)
                })
                .collect();
            e.sort_unstable();
            e
        };
        let edges = |g: &upmax::graphs::WeightedGraph| {
            let mut e: Vec<(usize, usize, u64)> = g.edges().map(|(u, v, w)| (u, v, (w * 1e9).round() as u64)).collect();
            e.sort_unstable();
            e
        };
        let n = inst.n_vars as usize;
        prop_assert_eq!(edges(&build_vig(&other)), edges(&build_vig(&inst)));
        prop_assert_eq!(remap(&build_cvig(&other), n), edges(&build_cvig(&inst)));
        prop_assert_eq!(
            remap(&build_res(&other, DEFAULT_PAIR_CAP).unwrap(), 0),
            edges(&build_res(&inst, DEFAULT_PAIR_CAP).unwrap())
        );
    }

    #[test]
    fn louvain_never_decreases_modularity(inst in instance(), seed in any::<u64>()) {
        for g in [build_vig(&inst), build_cvig(&inst), build_res(&inst, DEFAULT_PAIR_CAP).unwrap()] {
            if g.is_empty() {
                continue;
            }
            let ca = detect_communities(&g, seed);
            let singletons: Vec<usize> = (0..g.num_nodes()).collect();
            let q0 = modularity(&g, &singletons);
            prop_assert!(ca.history.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{:?}", ca.history);
            prop_assert!(ca.modularity >= q0 - 1e-12);
            prop_assert!(close(ca.modularity, modularity(&g, &ca.map)));
            prop_assert_eq!(ca.map.len(), g.num_nodes());
        }
    }

    #[test]
    fn derived_partitions_cover_the_softs(inst in instance(), seed in any::<u64>(), k in 1u32..20) {
        let graphs = [
            (Representation::Vig, build_vig(&inst)),
            (Representation::Cvig, build_cvig(&inst)),
            (Representation::Res, build_res(&inst, DEFAULT_PAIR_CAP).unwrap()),
        ];
        let mut parts = vec![random_partition(&inst, k, seed)];
        for (repr, g) in graphs {
            if !g.is_empty() {
                parts.push(derive_partitions(&inst, &detect_communities(&g, seed), repr));
            }
        }
        for p in parts {
            p.validate().unwrap();
            let blocks = p.blocks();
            prop_assert_eq!(blocks.len(), p.n_part as usize);
            prop_assert!(blocks.iter().all(|b| !b.is_empty()));
            let mut all: Vec<usize> = blocks.concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..inst.soft.len()).collect::<Vec<_>>());
            prop_assert_eq!(&p.base.hard, &inst.hard);
        }
    }

    #[test]
    fn node_kinds_follow_the_layout(inst in instance()) {
        let g = build_cvig(&inst);
        let n = inst.n_vars as usize;
        prop_assert_eq!(g.num_nodes(), n + inst.num_clauses());
        for (i, k) in g.nodes().iter().enumerate() {
            match k {
                NodeKind::Variable(v) => prop_assert_eq!(v.slot(), i),
                NodeKind::Clause(j) => prop_assert_eq!(n + j, i),
            }
        }
    }
}
