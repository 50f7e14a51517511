use crate::cnf::{Clause, Lit, VarAllocator};

/// Sequential counter (Sinz) encoding of `sum(lits) <= k`.
///
/// Register `s[i][j]` is true when at least `j + 1` of `lits[..=i]` are true.
pub fn encode_at_most_k(lits: &[Lit], k: usize, alloc: &mut VarAllocator) -> Vec<Clause> {
    let n = lits.len();
    let mut out = Vec::new();
    if k >= n {
        return out;
    }
    if k == 0 {
        out.extend(lits.iter().map(|&l| Clause::from_vec_unchecked(vec![!l])));
        return out;
    }
    let regs: Vec<Vec<Lit>> = (0..n - 1)
        .map(|_| (0..k).map(|_| alloc.fresh_lit()).collect())
        .collect();
    let cl = |lits: Vec<Lit>| Clause::from_vec_unchecked(lits);

    out.push(cl(vec![!lits[0], regs[0][0]]));
    for &r in &regs[0][1..] {
        out.push(cl(vec![!r]));
    }
    for i in 1..n - 1 {
        let x = lits[i];
        out.push(cl(vec![!x, regs[i][0]]));
        out.push(cl(vec![!regs[i - 1][0], regs[i][0]]));
        for j in 1..k {
            out.push(cl(vec![!x, !regs[i - 1][j - 1], regs[i][j]]));
            out.push(cl(vec![!regs[i - 1][j], regs[i][j]]));
        }
        out.push(cl(vec![!x, !regs[i - 1][k - 1]]));
    }
    out.push(cl(vec![!lits[n - 1], !regs[n - 2][k - 1]]));
    out
}

/// `sum(lits) >= k`, encoded as at-most-`(n - k)` over the negated literals.
///
/// With `k > n` the result is a single empty clause.
pub fn encode_at_least_k(lits: &[Lit], k: usize, alloc: &mut VarAllocator) -> Vec<Clause> {
    let n = lits.len();
    if k == 0 {
        return Vec::new();
    }
    if k > n {
        return vec![Clause::default()];
    }
    let negated: Vec<Lit> = lits.iter().map(|&l| !l).collect();
    encode_at_most_k(&negated, n - k, alloc)
}

/// One clause for at-least-one plus a sequential at-most-one.
pub fn encode_exactly_one(lits: &[Lit], alloc: &mut VarAllocator) -> Vec<Clause> {
    let mut out = vec![Clause::from_vec_unchecked(lits.to_vec())];
    out.extend(encode_at_most_k(lits, 1, alloc));
    out
}
