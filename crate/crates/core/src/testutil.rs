//! Independent helpers for unit tests: a plain DPLL and truth-table projection.

use std::collections::HashSet;

use crate::cnf::{Clause, Lit};

pub fn lit_vec(values: &[i32]) -> Vec<Lit> {
    values.iter().map(|&v| Lit::from_dimacs(v).unwrap()).collect()
}

/// Values indexed by `var - 1`; `None` = unassigned.
fn dpll(clauses: &[Clause], values: &mut Vec<Option<bool>>) -> bool {
    loop {
        let mut unit = None;
        for c in clauses {
            let mut open = None;
            let mut n_open = 0;
            let mut sat = false;
            for &l in c.lits() {
                match values[l.var().slot()] {
                    Some(b) if b == l.is_positive() => {
                        sat = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        n_open += 1;
                        open = Some(l);
                    }
                }
            }
            if sat {
                continue;
            }
            match n_open {
                0 => return false,
                1 => {
                    unit = open;
                    break;
                }
                _ => {}
            }
        }
        match unit {
            Some(l) => values[l.var().slot()] = Some(l.is_positive()),
            None => break,
        }
    }
    let Some(free) = values.iter().position(|v| v.is_none()) else {
        return true;
    };
    for b in [false, true] {
        let mut copy = values.clone();
        copy[free] = Some(b);
        if dpll(clauses, &mut copy) {
            *values = copy;
            return true;
        }
    }
    false
}

pub fn satisfiable_with(clauses: &[Clause], n_vars: u32, fixed: &[Lit]) -> bool {
    let mut values = vec![None; n_vars as usize];
    for &l in fixed {
        values[l.var().slot()] = Some(l.is_positive());
    }
    dpll(clauses, &mut values)
}

/// Assignments to variables `1..=n_orig` that extend to a model over `1..=n_total`.
pub fn projected_models(clauses: &[Clause], n_orig: u32, n_total: u32) -> Vec<Vec<bool>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n_orig) {
        let bits: Vec<bool> = (0..n_orig).map(|i| mask >> i & 1 == 1).collect();
        let fixed: Vec<Lit> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| Lit::new(crate::cnf::Var::new(i as u32 + 1), b))
            .collect();
        if satisfiable_with(clauses, n_total.max(n_orig), &fixed) {
            out.push(bits);
        }
    }
    out
}

/// Literals implied by unit propagation from `assumed`.
pub fn propagate_units(clauses: &[Clause], assumed: &[Lit]) -> HashSet<Lit> {
    let mut implied: HashSet<Lit> = assumed.iter().copied().collect();
    loop {
        let mut changed = false;
        for c in clauses {
            if c.lits().iter().any(|l| implied.contains(l)) {
                continue;
            }
            let open: Vec<Lit> = c.lits().iter().copied().filter(|l| !implied.contains(&!*l)).collect();
            if open.len() == 1 {
                implied.insert(open[0]);
                changed = true;
            }
        }
        if !changed {
            return implied;
        }
    }
}

/// Exhaustive MaxSAT optimum; `None` when the hard clauses are unsatisfiable.
pub fn brute_force_optimum(inst: &crate::cnf::MaxSatInstance) -> Option<u64> {
    let n = inst.n_vars;
    assert!(n <= 20, "brute force limited to 20 variables");
    (0u32..(1 << n))
        .map(|mask| crate::cnf::Model::new((0..n).map(|i| mask >> i & 1 == 1).collect()))
        .filter(|m| inst.hard_satisfied(m))
        .map(|m| inst.cost(&m))
        .min()
}

/// The seven-hard, four-soft running example with optimum 2.
pub fn two_triangles() -> crate::cnf::MaxSatInstance {
    let hard = [
        vec![1, 2],
        vec![-2, 3],
        vec![-1, -3],
        vec![4, 5],
        vec![-5, 6],
        vec![-4, -6],
        vec![-3, -6],
    ];
    let soft = [-1, -3, -4, -6];
    crate::cnf::MaxSatInstance {
        n_vars: 6,
        hard: hard.iter().map(|c| Clause::from_dimacs(c).unwrap()).collect(),
        soft: soft
            .iter()
            .map(|&l| crate::cnf::SoftClause::new(Clause::from_dimacs(&[l]).unwrap(), 1))
            .collect(),
        top: 5,
    }
}
