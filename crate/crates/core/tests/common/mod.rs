//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use upmax::encoders::{MscProblem, SeatingProblem};
use upmax::{Clause, Lit, MaxSatInstance, Model, SoftClause};

pub const EXAMPLE_PWCNF: &str = "p pwcnf 6 11 7 3
1 7 1 2 0
2 7 -2 3 0
1 7 -1 -3 0
3 7 4 5 0
3 7 -5 6 0
3 7 -4 -6 0
2 7 -3 -6 0
1 1 -1 0
2 1 -3 0
3 1 -4 0
3 1 -6 0
";

/// The running example as wcnf: seven hard clauses of weight 8, four unit softs.
pub fn example_wcnf() -> String {
    let mut s = String::from("p wcnf 6 11 8\n");
    for c in ["1 2", "-2 3", "-1 -3", "4 5", "-5 6", "-4 -6", "-3 -6"] {
        s.push_str(&format!("8 {c} 0\n"));
    }
    for l in [-1, -3, -4, -6] {
        s.push_str(&format!("1 {l} 0\n"));
    }
    s
}

pub fn clause(lits: &[i32]) -> Clause {
    Clause::from_dimacs(lits).unwrap()
}

/// Plain recursive DPLL over clauses given as signed integers.
pub fn dpll(clauses: &[Vec<i32>], n_vars: usize, fixed: &[i32]) -> Option<Vec<bool>> {
    let mut values: Vec<Option<bool>> = vec![None; n_vars + 1];
    for &l in fixed {
        let v = l.unsigned_abs() as usize;
        if values[v] == Some(l < 0) {
            return None;
        }
        values[v] = Some(l > 0);
    }
    if search(clauses, &mut values) {
        Some(values[1..].iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        None
    }
}

fn search(clauses: &[Vec<i32>], values: &mut Vec<Option<bool>>) -> bool {
    let value = |values: &[Option<bool>], l: i32| values[l.unsigned_abs() as usize].map(|b| b == (l > 0));
    loop {
        let mut unit = None;
        for c in clauses {
            if c.iter().any(|&l| value(values, l) == Some(true)) {
                continue;
            }
            let open: Vec<i32> = c.iter().copied().filter(|&l| value(values, l).is_none()).collect();
            match open.len() {
                0 => return false,
                1 => {
                    unit = Some(open[0]);
                    break;
                }
                _ => {}
            }
        }
        match unit {
            Some(l) => values[l.unsigned_abs() as usize] = Some(l > 0),
            None => break,
        }
    }
    let Some(free) = (1..values.len()).find(|&v| values[v].is_none()) else {
        return true;
    };
    for b in [false, true] {
        let mut copy = values.clone();
        copy[free] = Some(b);
        if search(clauses, &mut copy) {
            *values = copy;
            return true;
        }
    }
    false
}

pub fn as_ints(c: &Clause) -> Vec<i32> {
    c.lits().iter().map(|l| l.to_dimacs()).collect()
}

/// Minimum cost over all assignments, `None` if the hard clauses are unsatisfiable.
pub fn brute_force_optimum(inst: &MaxSatInstance) -> Option<u64> {
    let n = inst.n_vars;
    assert!(n <= 20);
    (0u32..1 << n)
        .map(|mask| Model::new((0..n).map(|i| mask >> i & 1 == 1).collect()))
        .filter(|m| inst.hard.iter().all(|c| m.satisfies(c)))
        .map(|m| {
            inst.soft
                .iter()
                .filter(|s| !m.satisfies(&s.clause))
                .map(|s| s.weight)
                .sum()
        })
        .min()
}

/// Minimum color sum over proper colorings, colors numbered from 1.
pub fn msc_oracle(p: &MscProblem) -> Option<u64> {
    let total = p.n_colors.pow(p.n_vertices as u32);
    (0..total)
        .filter_map(|mut code| {
            let colors: Vec<usize> = (0..p.n_vertices)
                .map(|_| {
                    let c = code % p.n_colors;
                    code /= p.n_colors;
                    c
                })
                .collect();
            p.edges
                .iter()
                .all(|&(u, v)| colors[u] != colors[v])
                .then(|| colors.iter().map(|&c| c as u64 + 1).sum())
        })
        .min()
}

/// Minimum total of distinct tags per table over feasible seatings.
pub fn seating_oracle(p: &SeatingProblem) -> Option<u64> {
    let n = p.persons.len();
    let total = p.n_tables.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let tables: Vec<usize> = (0..n)
                .map(|_| {
                    let t = code % p.n_tables;
                    code /= p.n_tables;
                    t
                })
                .collect();
            let mut cost = 0;
            for t in 0..p.n_tables {
                let at: Vec<usize> = (0..n).filter(|&q| tables[q] == t).collect();
                if at.len() < p.min || at.len() > p.max {
                    return None;
                }
                let mut tags: Vec<usize> = at.iter().flat_map(|&q| p.persons[q].iter().copied()).collect();
                tags.sort_unstable();
                tags.dedup();
                cost += tags.len() as u64;
            }
            Some(cost)
        })
        .min()
}

pub fn appendix_msc() -> MscProblem {
    MscProblem::new(4, [(0, 1), (0, 2), (1, 2), (2, 3)], 4).unwrap()
}

pub fn appendix_seating() -> SeatingProblem {
    let (a, b, c) = (0, 1, 2);
    let persons = vec![vec![a, b], vec![c], vec![b], vec![c, a], vec![a]];
    SeatingProblem::new(persons, 3, 2, 2, 3).unwrap()
}

fn random_clause(rng: &mut impl Rng, n_vars: u32, max_len: usize) -> Clause {
    loop {
        let len = rng.gen_range(1..=max_len);
        let lits: Vec<Lit> = (0..len)
            .map(|_| {
                let v = rng.gen_range(1..=n_vars) as i32;
                Lit::from_dimacs(if rng.gen_bool(0.5) { v } else { -v }).unwrap()
            })
            .collect();
        if let Ok(c) = Clause::new(lits) {
            return c;
        }
    }
}

/// Random partial MaxSAT formula with user labels in `1..=k`.
pub fn random_maxsat(rng: &mut impl Rng, max_vars: u32, weighted: bool) -> (MaxSatInstance, u32) {
    let n_vars = rng.gen_range(2..=max_vars);
    let n_hard = rng.gen_range(0..=(2 * n_vars as usize));
    let n_soft = rng.gen_range(1..=(2 * n_vars as usize).min(20));
    let k = rng.gen_range(1..=4u32);
    let hard = (0..n_hard).map(|_| random_clause(rng, n_vars, 3)).collect();
    let soft: Vec<SoftClause> = (0..n_soft)
        .map(|_| {
            let w = if weighted { rng.gen_range(1..=9) } else { 1 };
            SoftClause::new(random_clause(rng, n_vars, 2), w).with_partition(rng.gen_range(1..=k))
        })
        .collect();
    let top = soft.iter().map(|s| s.weight).sum::<u64>() + 1;
    (
        MaxSatInstance {
            n_vars,
            hard,
            soft,
            top,
        },
        k,
    )
}

/// Random 3-CNF with `n_vars` variables as signed integers.
pub fn random_3cnf(rng: &mut impl Rng, n_vars: u32, n_clauses: usize) -> Vec<Vec<i32>> {
    (0..n_clauses)
        .map(|_| {
            let mut vars = Vec::new();
            while vars.len() < 3.min(n_vars as usize) {
                let v = rng.gen_range(1..=n_vars) as i32;
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            vars.into_iter()
                .map(|v| if rng.gen_bool(0.5) { v } else { -v })
                .collect()
        })
        .collect()
}
