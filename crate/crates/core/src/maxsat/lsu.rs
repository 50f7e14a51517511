use super::engine::{Call, Engine, Stop};
use super::Solved;
use crate::cnf::Lit;
use crate::encodings::{Totalizer, WeightedTotalizer};

/// Linear SAT-UNSAT search: every soft is relaxed by its guard and the
/// weighted sum of guards is bounded strictly below the best cost found.
pub(crate) fn solve(engine: &mut Engine<'_>, softs: &[usize]) -> Result<Solved, Stop> {
    let guards: Vec<(Lit, u64)> = softs
        .iter()
        .map(|&i| (engine.guard(i), engine.weight(i)))
        .collect();
    let w0 = guards.first().map(|&(_, w)| w);
    let unit = w0.filter(|&w| guards.iter().all(|&(_, x)| x == w));

    let mut best: Option<Solved> = None;
    let mut bound: Vec<Lit> = Vec::new();
    let mut unit_card: Option<Totalizer> = None;
    let mut weighted_card: Option<WeightedTotalizer> = None;
    loop {
        match engine.call(&bound) {
            Ok(Call::Sat(model)) => {
                let cost = engine.cost_over(&model, softs);
                debug_assert!(best.as_ref().is_none_or(|b| cost < b.cost));
                best = Some(Solved { cost, model });
                if cost == 0 {
                    break;
                }
                let (alloc, mut sink) = engine.parts();
                bound = match unit {
                    Some(w) => {
                        let lits: Vec<Lit> = guards.iter().map(|&(l, _)| l).collect();
                        let tot = unit_card
                            .get_or_insert_with(|| Totalizer::new(&lits, 0, alloc, &mut sink));
                        let k = (cost / w - 1) as usize;
                        tot.at_most(k, alloc, &mut sink).into_iter().collect()
                    }
                    None => {
                        let gte = weighted_card
                            .get_or_insert_with(|| WeightedTotalizer::new(&guards, alloc, &mut sink));
                        gte.at_most(cost - 1)
                    }
                };
            }
            Ok(Call::Core(_)) => break,
            Err(Stop::HardUnsat) if best.is_some() => break,
            Err(e) => return Err(e),
        }
    }
    Ok(best.expect("loop exits after a model"))
}
