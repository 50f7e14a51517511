use std::collections::{BTreeMap, HashMap};

use super::engine::{Call, Engine, Stop};
use super::{CoreGuided, Solved};
use crate::cnf::Lit;
use crate::encodings::encode_at_most_k;

/// Bound on symmetry-breaking clauses added per solve.
const SYMMETRY_LIMIT: usize = 500_000;

struct Item {
    soft: usize,
    relax: Vec<Lit>,
    /// `(core, r)` per relaxation, where `core` is the first relaxation
    /// variable of that core.
    history: Vec<(Lit, Lit)>,
    guard: Lit,
    weight: u64,
}

/// WBO: each core relaxes its clauses with one fresh variable apiece and an
/// at-most-one constraint over the new variables.
///
/// Weighted cores are split by their minimum weight: the relaxed copy of a
/// clause carries that weight and the original keeps the remainder.
///
/// On instances with equal soft weights no clause is ever split, so the
/// relaxation variables of two cores sharing clauses are interchangeable;
/// lexicographic symmetry-breaking clauses then forbid all but one ordering.
pub(crate) struct Wbo {
    softs: Vec<usize>,
    items: Vec<Item>,
    /// Assumption literal of an active item -> item index.
    active: HashMap<Lit, usize>,
    bound: u64,
    symmetry: bool,
    symmetry_clauses: usize,
}

impl CoreGuided for Wbo {
    fn new(engine: &mut Engine<'_>, softs: &[usize]) -> Wbo {
        let mut wbo = Wbo {
            softs: softs.to_vec(),
            items: Vec::with_capacity(softs.len()),
            active: HashMap::new(),
            bound: 0,
            symmetry: engine.inst.is_unweighted(),
            symmetry_clauses: 0,
        };
        for &i in softs {
            let guard = engine.guard(i);
            wbo.push(Item {
                soft: i,
                relax: Vec::new(),
                history: Vec::new(),
                guard,
                weight: engine.weight(i),
            });
        }
        wbo
    }

    fn merge(_engine: &mut Engine<'_>, a: Wbo, b: Wbo) -> Wbo {
        let mut merged = a;
        merged.softs.extend(b.softs);
        let offset = merged.items.len();
        merged.items.extend(b.items);
        merged
            .active
            .extend(b.active.into_iter().map(|(l, i)| (l, i + offset)));
        merged.bound += b.bound;
        merged.symmetry_clauses += b.symmetry_clauses;
        merged
    }

    fn lower_bound(&self) -> u64 {
        self.bound
    }

    fn softs(&self) -> &[usize] {
        &self.softs
    }

    fn solve(&mut self, engine: &mut Engine<'_>) -> Result<Solved, Stop> {
        loop {
            let mut assumps: Vec<Lit> = self.active.keys().copied().collect();
            assumps.sort();
            match engine.call(&assumps)? {
                Call::Sat(model) => {
                    let cost = engine.cost_over(&model, &self.softs);
                    debug_assert_eq!(cost, self.bound);
                    return Ok(Solved { cost, model });
                }
                Call::Core(mut core) => {
                    core.sort();
                    core.dedup();
                    let members: Vec<usize> = core
                        .iter()
                        .map(|l| self.active[l])
                        .collect();
                    let min_w = members
                        .iter()
                        .map(|&j| self.items[j].weight)
                        .min()
                        .expect("non-empty core");
                    self.bound += min_w;
                    let mut fresh = Vec::new();
                    let mut shared: BTreeMap<Lit, (Vec<Lit>, Vec<Lit>)> = BTreeMap::new();
                    for &j in &members {
                        if members.len() > 1 {
                            let r = engine.alloc.fresh_lit();
                            let g = engine.alloc.fresh_lit();
                            let core_id = fresh.first().copied().unwrap_or(r);
                            for &(k, old) in &self.items[j].history {
                                let entry = shared.entry(k).or_default();
                                entry.0.push(old);
                                entry.1.push(r);
                            }
                            let mut relax = self.items[j].relax.clone();
                            relax.push(r);
                            let mut history = self.items[j].history.clone();
                            history.push((core_id, r));
                            let soft = self.items[j].soft;
                            let mut lits = engine.inst.soft[soft].clause.lits().to_vec();
                            lits.extend_from_slice(&relax);
                            lits.push(g);
                            engine.sink().add_lits(&lits);
                            fresh.push(r);
                            self.push(Item {
                                soft,
                                relax,
                                history,
                                guard: g,
                                weight: min_w,
                            });
                        }
                        let item = &mut self.items[j];
                        item.weight -= min_w;
                        if item.weight == 0 {
                            self.active.remove(&!item.guard);
                        }
                    }
                    if self.symmetry {
                        self.break_symmetries(engine, &shared);
                    }
                    if fresh.len() > 1 {
                        let (alloc, mut sink) = engine.parts();
                        for c in encode_at_most_k(&fresh, 1, alloc) {
                            crate::encodings::ClauseSink::add_clause(&mut sink, c);
                        }
                    }
                }
            }
        }
    }
}

impl Wbo {
    /// For an earlier core `k` and clauses `p_i` before `p_j` (in core order)
    /// relaxed by both `k` and the new core, forbids relaxing `p_i` through
    /// `k` together with `p_j` through the new core.
    fn break_symmetries(&mut self, engine: &mut Engine<'_>, shared: &BTreeMap<Lit, (Vec<Lit>, Vec<Lit>)>) {
        for (old, new) in shared.values() {
            for (i, &a) in old.iter().enumerate() {
                for &b in &new[i + 1..] {
                    if self.symmetry_clauses >= SYMMETRY_LIMIT {
                        return;
                    }
                    engine.sink().add_lits(&[!a, !b]);
                    self.symmetry_clauses += 1;
                }
            }
        }
    }

    fn push(&mut self, item: Item) {
        self.active.insert(!item.guard, self.items.len());
        self.items.push(item);
    }
}
