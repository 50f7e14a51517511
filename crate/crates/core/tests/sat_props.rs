mod common;

use proptest::prelude::*;

use common::{clause, dpll};
use upmax::sat::{SolveOutcome, Solver};
use upmax::Lit;

fn cnf(max_vars: u32) -> impl Strategy<Value = (u32, Vec<Vec<i32>>)> {
    (2..=max_vars).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, p)| if p { v } else { -v });
        let c = prop::collection::vec(lit, 1..4).prop_filter("tautology", |c| {
            !c.iter().any(|l| c.contains(&-l))
        });
        (Just(n), prop::collection::vec(c, 1..(5 * n as usize)))
    })
}

fn assumptions(n: u32) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=n as i32, any::<bool>()), 0..(n as usize).min(6)).prop_map(|v| {
        let mut seen = Vec::new();
        v.into_iter()
            .filter_map(|(x, p)| {
                if seen.contains(&x) {
                    return None;
                }
                seen.push(x);
                Some(if p { x } else { -x })
            })
            .collect()
    })
}

fn lits(ints: &[i32]) -> Vec<Lit> {
    ints.iter().map(|&i| Lit::from_dimacs(i).unwrap()).collect()
}

fn check(outcome: &SolveOutcome, db: &[Vec<i32>], n: u32, assumed: &[i32]) -> Result<(), TestCaseError> {
    let oracle = dpll(db, n as usize, assumed).is_some();
    match outcome {
        SolveOutcome::Sat(m) => {
            prop_assert!(oracle);
            prop_assert!(db.iter().all(|c| m.satisfies(&clause(c))));
            prop_assert!(lits(assumed).iter().all(|&l| m.lit(l)));
        }
        SolveOutcome::Unsat(core) => {
            prop_assert!(!oracle);
            let a = lits(assumed);
            prop_assert!(core.iter().all(|l| a.contains(l)));
            let core_ints: Vec<i32> = core.iter().map(|l| l.to_dimacs()).collect();
            prop_assert!(dpll(db, n as usize, &core_ints).is_none());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn incremental_matches_fresh(
        (n, clauses) in cnf(12),
        cuts in prop::collection::vec(any::<prop::sample::Index>(), 0..4),
        assumed in prop::collection::vec(assumptions(12), 4),
    ) {
        let mut cut_points: Vec<usize> = cuts.iter().map(|i| i.index(clauses.len() + 1)).collect();
        cut_points.push(clauses.len());
        cut_points.sort_unstable();
        let mut solver = Solver::new();
        solver.reserve_vars(n as usize);
        let mut added = 0;
        for (round, &cut) in cut_points.iter().enumerate() {
            for c in &clauses[added..cut] {
                solver.add_clause(&clause(c)).unwrap();
            }
            added = cut;
            let a: Vec<i32> = assumed[round % assumed.len()].iter().copied().filter(|l| l.unsigned_abs() <= n).collect();
            let incremental = solver.solve_under_assumptions(&lits(&a));
            check(&incremental, &clauses[..added], n, &a)?;
            let mut fresh = Solver::new();
            fresh.reserve_vars(n as usize);
            for c in &clauses[..added] {
                fresh.add_clause(&clause(c)).unwrap();
            }
            prop_assert_eq!(fresh.solve_under_assumptions(&lits(&a)).is_sat(), incremental.is_sat());
        }
    }

    #[test]
    fn fixed_input_is_deterministic((n, clauses) in cnf(16), assumed in assumptions(16)) {
        let a: Vec<i32> = assumed.into_iter().filter(|l| l.unsigned_abs() <= n).collect();
        let run = || {
            let mut s = Solver::new();
            s.reserve_vars(n as usize);
            for c in &clauses {
                s.add_clause(&clause(c)).unwrap();
            }
            let out = s.solve_under_assumptions(&lits(&a));
            (out, s.stats())
        };
        let (first, second) = (run(), run());
        prop_assert_eq!(&first, &second);
        check(&first.0, &clauses, n, &a)?;
    }
}
