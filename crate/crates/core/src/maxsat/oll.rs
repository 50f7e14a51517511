use std::collections::{BTreeMap, HashMap};

use super::engine::{Call, Engine, Stop};
use super::{CoreGuided, Solved};
use crate::cnf::Lit;
use crate::encodings::Totalizer;

/// OLL: every core becomes a soft cardinality constraint of its own.
///
/// The objective is a weighted set of assumption literals. A core with minimum
/// weight `w` raises the bound by `w`, subtracts `w` from its members and adds
/// a totalizer over them whose "at most one violated" output is a new
/// objective literal of weight `w`. When such an output shows up in a later
/// core, the next output of the same totalizer joins the objective.
pub(crate) struct Oll {
    softs: Vec<usize>,
    /// Assumption literal -> remaining weight.
    objective: BTreeMap<Lit, u64>,
    /// Output assumption -> (totalizer index, bound it enforces).
    outputs: HashMap<Lit, (usize, usize)>,
    totalizers: Vec<Totalizer>,
    bound: u64,
}

impl CoreGuided for Oll {
    fn new(engine: &mut Engine<'_>, softs: &[usize]) -> Oll {
        let objective = softs
            .iter()
            .map(|&i| (!engine.guard(i), engine.weight(i)))
            .collect();
        Oll {
            softs: softs.to_vec(),
            objective,
            outputs: HashMap::new(),
            totalizers: Vec::new(),
            bound: 0,
        }
    }

    fn merge(_engine: &mut Engine<'_>, a: Oll, b: Oll) -> Oll {
        let offset = a.totalizers.len();
        let mut merged = a;
        merged.softs.extend(b.softs);
        merged.objective.extend(b.objective);
        merged
            .outputs
            .extend(b.outputs.into_iter().map(|(l, (t, k))| (l, (t + offset, k))));
        merged.totalizers.extend(b.totalizers);
        merged.bound += b.bound;
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
            let assumps: Vec<Lit> = self.objective.keys().copied().collect();
            match engine.call(&assumps)? {
                Call::Sat(model) => {
                    let cost = engine.cost_over(&model, &self.softs);
                    debug_assert_eq!(cost, self.bound);
                    return Ok(Solved { cost, model });
                }
                Call::Core(mut core) => {
                    core.sort();
                    core.dedup();
                    let min_w = core
                        .iter()
                        .map(|l| self.objective[l])
                        .min()
                        .expect("non-empty core");
                    self.bound += min_w;
                    for l in &core {
                        let w = self.objective.get_mut(l).expect("core literal is an assumption");
                        *w -= min_w;
                        if *w == 0 {
                            self.objective.remove(l);
                        }
                    }
                    for l in &core {
                        if let Some(&(t, k)) = self.outputs.get(l) {
                            self.extend_output(engine, t, k + 1, min_w);
                        }
                    }
                    if core.len() > 1 {
                        let violated: Vec<Lit> = core.iter().map(|&l| !l).collect();
                        let (alloc, mut sink) = engine.parts();
                        let tot = Totalizer::new(&violated, 2, alloc, &mut sink);
                        self.totalizers.push(tot);
                        self.extend_output(engine, self.totalizers.len() - 1, 1, min_w);
                    }
                }
            }
        }
    }
}

impl Oll {
    /// Adds the assumption "at most `k` inputs of totalizer `t` true" with weight `w`.
    fn extend_output(&mut self, engine: &mut Engine<'_>, t: usize, k: usize, w: u64) {
        let (alloc, mut sink) = engine.parts();
        if let Some(a) = self.totalizers[t].at_most(k, alloc, &mut sink) {
            *self.objective.entry(a).or_insert(0) += w;
            self.outputs.insert(a, (t, k));
        }
    }
}
