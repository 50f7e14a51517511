use std::collections::BTreeSet;

use super::engine::{Call, Engine, Stop};
use super::{CoreGuided, Solved};
use crate::cnf::Lit;
use crate::encodings::{Totalizer, WeightedTotalizer};

enum Card {
    Unit(Totalizer),
    Weighted(WeightedTotalizer),
}

/// MSU3: a single cardinality constraint over every relaxed soft clause,
/// with one global bound raised on each core.
pub(crate) struct Msu3 {
    softs: Vec<usize>,
    unrelaxed: BTreeSet<usize>,
    card: Option<Card>,
    /// Lower bound: violation count when `unit` is set, otherwise weight.
    bound: u64,
    /// Common weight of all soft clauses, when there is one.
    unit: Option<u64>,
}

impl Msu3 {
    fn lower_bound_weight(&self) -> u64 {
        match self.unit {
            Some(w) => self.bound * w,
            None => self.bound,
        }
    }

    fn bound_assumptions(&mut self, engine: &mut Engine<'_>) -> Vec<Lit> {
        let bound = self.bound;
        match &mut self.card {
            None => Vec::new(),
            Some(Card::Unit(tot)) => {
                let (alloc, mut sink) = engine.parts();
                tot.at_most(bound as usize, alloc, &mut sink).into_iter().collect()
            }
            Some(Card::Weighted(gte)) => gte.at_most(bound),
        }
    }
}

impl CoreGuided for Msu3 {
    fn new(engine: &mut Engine<'_>, softs: &[usize]) -> Msu3 {
        for &i in softs {
            engine.guard(i);
        }
        let w0 = engine.inst.soft.first().map(|s| s.weight);
        let unit = w0.filter(|&w| engine.inst.soft.iter().all(|s| s.weight == w));
        Msu3 {
            softs: softs.to_vec(),
            unrelaxed: softs.iter().copied().collect(),
            card: None,
            bound: 0,
            unit,
        }
    }

    fn merge(engine: &mut Engine<'_>, a: Msu3, b: Msu3) -> Msu3 {
        let (alloc, mut sink) = engine.parts();
        let card = match (a.card, b.card) {
            (None, c) | (c, None) => c,
            (Some(Card::Unit(x)), Some(Card::Unit(y))) => {
                Some(Card::Unit(Totalizer::merge(x, y, alloc, &mut sink)))
            }
            (Some(Card::Weighted(x)), Some(Card::Weighted(y))) => {
                Some(Card::Weighted(WeightedTotalizer::merge(x, y, alloc, &mut sink)))
            }
            _ => unreachable!("both halves share the instance's weight mode"),
        };
        let mut softs = a.softs;
        softs.extend(b.softs);
        let mut unrelaxed = a.unrelaxed;
        unrelaxed.extend(b.unrelaxed);
        Msu3 {
            softs,
            unrelaxed,
            card,
            bound: a.bound + b.bound,
            unit: a.unit,
        }
    }

    fn lower_bound(&self) -> u64 {
        self.lower_bound_weight()
    }

    fn softs(&self) -> &[usize] {
        &self.softs
    }

    fn solve(&mut self, engine: &mut Engine<'_>) -> Result<Solved, Stop> {
        loop {
            let mut assumps: Vec<Lit> = self.unrelaxed.iter().map(|&i| !engine.guard(i)).collect();
            assumps.extend(self.bound_assumptions(engine));
            match engine.call(&assumps)? {
                Call::Sat(model) => {
                    let cost = engine.cost_over(&model, &self.softs);
                    debug_assert_eq!(cost, self.lower_bound_weight());
                    return Ok(Solved { cost, model });
                }
                Call::Core(core) => {
                    let newly: Vec<usize> = self
                        .unrelaxed
                        .iter()
                        .copied()
                        .filter(|&i| core.contains(&!engine.guard(i)))
                        .collect();
                    self.add_relaxed(engine, &newly);
                    self.bound = match (&self.card, self.unit) {
                        (_, Some(_)) => self.bound + 1,
                        (Some(Card::Weighted(gte)), None) => gte
                            .next_value_above(self.bound)
                            .expect("relaxed weight exceeds a valid lower bound"),
                        (_, None) => unreachable!("weighted core without a cardinality structure"),
                    };
                }
            }
        }
    }
}

impl Msu3 {
    fn add_relaxed(&mut self, engine: &mut Engine<'_>, newly: &[usize]) {
        if newly.is_empty() {
            return;
        }
        for i in newly {
            self.unrelaxed.remove(i);
        }
        let guards: Vec<(Lit, u64)> = newly.iter().map(|&i| (engine.guard(i), engine.weight(i))).collect();
        let (alloc, mut sink) = engine.parts();
        self.card = Some(match (self.card.take(), self.unit) {
            (None, Some(_)) => {
                let lits: Vec<Lit> = guards.iter().map(|&(l, _)| l).collect();
                Card::Unit(Totalizer::new(&lits, 0, alloc, &mut sink))
            }
            (Some(Card::Unit(tot)), Some(_)) => {
                let lits: Vec<Lit> = guards.iter().map(|&(l, _)| l).collect();
                Card::Unit(tot.add_inputs(&lits, alloc, &mut sink))
            }
            (None, None) => Card::Weighted(WeightedTotalizer::new(&guards, alloc, &mut sink)),
            (Some(Card::Weighted(gte)), None) => {
                Card::Weighted(gte.add_inputs(&guards, alloc, &mut sink))
            }
            _ => unreachable!(),
        });
    }
}
