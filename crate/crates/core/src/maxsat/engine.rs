use std::time::Instant;

use crate::cnf::{Lit, MaxSatInstance, Model, VarAllocator};
use crate::encodings::ClauseSink;
use crate::sat::{Interrupted, SolveOutcome, Solver};

/// Why a search stopped without proving optimality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    HardUnsat,
    Timeout,
}

impl From<Interrupted> for Stop {
    fn from(_: Interrupted) -> Stop {
        Stop::Timeout
    }
}

/// Result of a SAT call as seen by the MaxSAT algorithms.
pub(crate) enum Call {
    Sat(Model),
    Core(Vec<Lit>),
}

/// SAT solver, variable allocator and soft-clause guards shared by every
/// partition of one instance.
pub(crate) struct Engine<'a> {
    pub inst: &'a MaxSatInstance,
    pub solver: Solver,
    pub alloc: VarAllocator,
    guards: Vec<Option<Lit>>,
    pub sat_calls: u64,
    pub cores: u64,
    best: Option<(u64, Model)>,
}

impl<'a> Engine<'a> {
    pub fn new(inst: &'a MaxSatInstance, deadline: Option<Instant>) -> Engine<'a> {
        let mut solver = Solver::new();
        solver.reserve_vars(inst.n_vars as usize);
        solver.set_deadline(deadline);
        for c in &inst.hard {
            solver.add_clause(c).expect("instance variables reserved");
        }
        Engine {
            inst,
            solver,
            alloc: VarAllocator::new(inst.n_vars),
            guards: vec![None; inst.soft.len()],
            sat_calls: 0,
            cores: 0,
            best: None,
        }
    }

    /// Guard literal `g` of soft clause `i`; the clause `s_i | g` is added on first use.
    pub fn guard(&mut self, i: usize) -> Lit {
        if let Some(g) = self.guards[i] {
            return g;
        }
        let g = self.alloc.fresh_lit();
        let mut lits = self.inst.soft[i].clause.lits().to_vec();
        lits.push(g);
        self.sink().add_lits(&lits);
        self.guards[i] = Some(g);
        g
    }

    pub fn sink(&mut self) -> EngineSink<'_> {
        EngineSink {
            solver: &mut self.solver,
        }
    }

    /// Allocator and clause sink borrowed together, for encodings.
    pub fn parts(&mut self) -> (&mut VarAllocator, EngineSink<'_>) {
        (
            &mut self.alloc,
            EngineSink {
                solver: &mut self.solver,
            },
        )
    }

    pub fn weight(&self, i: usize) -> u64 {
        self.inst.soft[i].weight
    }

    /// Cost of `model` restricted to the soft clauses `softs`.
    pub fn cost_over(&self, model: &Model, softs: &[usize]) -> u64 {
        softs
            .iter()
            .filter(|&&i| !model.satisfies(&self.inst.soft[i].clause))
            .map(|&i| self.inst.soft[i].weight)
            .sum()
    }

    pub fn call(&mut self, assumptions: &[Lit]) -> Result<Call, Stop> {
        self.sat_calls += 1;
        match self.solver.solve_limited(assumptions)? {
            SolveOutcome::Sat(model) => {
                let model = model.truncated(self.inst.n_vars);
                let cost = self.inst.cost(&model);
                if self.best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    self.best = Some((cost, model.clone()));
                }
                Ok(Call::Sat(model))
            }
            SolveOutcome::Unsat(core) if core.is_empty() => Err(Stop::HardUnsat),
            SolveOutcome::Unsat(core) => {
                self.cores += 1;
                Ok(Call::Core(core))
            }
        }
    }

    /// Best full-instance cost seen in any model so far.
    pub fn incumbent(&self) -> Option<&(u64, Model)> {
        self.best.as_ref()
    }

    /// Seeds decision phases from a model of the original variables.
    pub fn seed_phases(&mut self, model: &Model) {
        for (i, &b) in model.values().iter().enumerate() {
            self.solver.set_phase(crate::cnf::Var::new(i as u32 + 1), b);
        }
    }
}

/// Clause sink that grows the solver's variable range on demand.
pub(crate) struct EngineSink<'s> {
    solver: &'s mut Solver,
}

impl EngineSink<'_> {
    pub fn add_lits(&mut self, lits: &[Lit]) {
        if let Some(max) = lits.iter().map(|l| l.var().index() as usize).max() {
            self.solver.reserve_vars(max);
        }
        self.solver.add_lits(lits).expect("variables reserved above");
    }
}

impl ClauseSink for EngineSink<'_> {
    fn add_clause(&mut self, clause: crate::cnf::Clause) {
        self.add_lits(clause.lits());
    }
}
