mod common;

use proptest::prelude::*;

use common::{as_ints, dpll};
use upmax::encodings::{
    build_generalized_totalizer, build_totalizer, encode_at_least_k, encode_at_most_k, encode_exactly_one,
};
use upmax::{Clause, Lit, VarAllocator};

/// Distinct input literals over variables `1..=n`, random polarity.
fn inputs(max: usize) -> impl Strategy<Value = (u32, Vec<Lit>)> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n).prop_map(move |pols| {
            let lits = pols
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let v = i as i32 + 1;
                    Lit::from_dimacs(if p { v } else { -v }).unwrap()
                })
                .collect();
            (n as u32, lits)
        })
    })
}

fn hygienic(clauses: &[Clause], n: u32, inputs: &[Lit], alloc: &VarAllocator) -> bool {
    clauses.iter().flat_map(|c| c.lits()).all(|l| {
        let v = l.var().index();
        inputs.iter().any(|i| i.var() == l.var()) || (v > n && v <= alloc.max_var())
    })
}

/// Input assignments (as bitmasks over `inputs`) extending to a model.
fn models(clauses: &[Clause], n_total: u32, inputs: &[Lit]) -> Vec<u32> {
    let ints: Vec<Vec<i32>> = clauses.iter().map(as_ints).collect();
    (0u32..1 << inputs.len())
        .filter(|mask| {
            let fixed: Vec<i32> = inputs
                .iter()
                .enumerate()
                .map(|(i, l)| if mask >> i & 1 == 1 { l.to_dimacs() } else { -l.to_dimacs() })
                .collect();
            dpll(&ints, n_total as usize, &fixed).is_some()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_is_an_involution(v in 1i32..100_000, pos in any::<bool>()) {
        let l = Lit::from_dimacs(if pos { v } else { -v }).unwrap();
        prop_assert_eq!(!!l, l);
        prop_assert_ne!(!l, l);
        prop_assert_eq!((!l).var(), l.var());
    }

    #[test]
    fn fresh_variable_hygiene((n, lits) in inputs(10), k in 0usize..12, weights in prop::collection::vec(1u64..9, 10)) {
        let mut alloc = VarAllocator::new(n);
        let cl = encode_at_most_k(&lits, k, &mut alloc);
        prop_assert!(hygienic(&cl, n, &lits, &alloc));
        let mut alloc = VarAllocator::new(n);
        let cl = encode_at_least_k(&lits, k, &mut alloc);
        prop_assert!(hygienic(&cl, n, &lits, &alloc));
        let mut alloc = VarAllocator::new(n);
        let cl = encode_exactly_one(&lits, &mut alloc);
        prop_assert!(hygienic(&cl, n, &lits, &alloc));
        let mut alloc = VarAllocator::new(n);
        let (mut tot, mut cl) = build_totalizer(&lits, &mut alloc);
        let _ = tot.at_most(k, &mut alloc, &mut cl);
        prop_assert!(hygienic(&cl, n, &lits, &alloc));
        let weighted: Vec<(Lit, u64)> = lits.iter().copied().zip(weights).collect();
        let mut alloc = VarAllocator::new(n);
        let (_, cl) = build_generalized_totalizer(&weighted, &mut alloc);
        prop_assert!(hygienic(&cl, n, &lits, &alloc));
    }

    #[test]
    fn totalizer_bounds_are_monotone((n, lits) in inputs(6)) {
        let mut previous: Option<Vec<u32>> = None;
        for k in (0..=n as usize).rev() {
            let mut alloc = VarAllocator::new(n);
            let (mut tot, mut cl) = build_totalizer(&lits, &mut alloc);
            if let Some(unit) = tot.at_most(k, &mut alloc, &mut cl) {
                cl.push(Clause::new([unit]).unwrap());
            }
            let now = models(&cl, alloc.max_var(), &lits);
            if let Some(prev) = &previous {
                prop_assert!(now.iter().all(|m| prev.contains(m)), "bound {k} admits new assignments");
            }
            previous = Some(now);
        }
    }

    #[test]
    fn incremental_totalizer_tightening((n, lits) in inputs(6)) {
        let mut alloc = VarAllocator::new(n);
        let (mut tot, mut cl) = build_totalizer(&lits, &mut alloc);
        for k in (0..n as usize).rev() {
            let unit = tot.at_most(k, &mut alloc, &mut cl).unwrap();
            let mut with = cl.clone();
            with.push(Clause::new([unit]).unwrap());
            let expected: Vec<u32> = (0u32..1 << n).filter(|m| {
                (0..n).filter(|i| m >> i & 1 == 1).count() <= k
            }).collect();
            prop_assert_eq!(models(&with, alloc.max_var(), &lits), expected);
        }
    }
}
