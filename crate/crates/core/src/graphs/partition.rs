use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_graph, detect_communities, CommunityAssignment, GraphTooLarge, Representation};
use crate::cnf::{Clause, MaxSatInstance, PartitionedInstance};

/// Relabels `raw` group ids to `1..=k` in order of first soft clause.
/// Returns the labels and a raw-id -> label lookup.
fn renumber(raw: &[usize]) -> (Vec<u32>, Vec<u32>) {
    let size = raw.iter().max().map_or(0, |&m| m + 1);
    let mut lookup = vec![0u32; size];
    let mut next = 0u32;
    let labels = raw
        .iter()
        .map(|&r| {
            if lookup[r] == 0 {
                next += 1;
                lookup[r] = next;
            }
            lookup[r]
        })
        .collect();
    (labels, lookup)
}

fn build(inst: &MaxSatInstance, labels: Vec<u32>, hard_labels: Vec<u32>) -> PartitionedInstance {
    let mut base = inst.clone();
    for (s, l) in base.soft.iter_mut().zip(&labels) {
        s.partition = *l;
    }
    let n_part = labels.iter().copied().max().unwrap_or(1);
    PartitionedInstance {
        base,
        n_part,
        hard_labels,
    }
}

/// Community holding most of the clause's variables, lowest id on ties.
fn plurality(clause: &Clause, ca: &CommunityAssignment) -> Option<usize> {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for v in clause.vars() {
        let c = ca.map[v.slot()];
        match counts.iter_mut().find(|e| e.0 == c) {
            Some(e) => e.1 += 1,
            None => counts.push((c, 1)),
        }
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|e| e.0)
}

/// Turns communities of the `repr` graph of `inst` into soft partitions.
///
/// With VIG a soft clause joins the community holding most of its variables;
/// a clause without variables joins community 0. With CVIG and RES it joins
/// the community of its own clause node. Labels are renumbered `1..=n_part`
/// in order of first soft clause. Hard clauses get the label of their own
/// community when that community holds soft clauses, otherwise label 1.
pub fn derive_partitions(
    inst: &MaxSatInstance,
    ca: &CommunityAssignment,
    repr: Representation,
) -> PartitionedInstance {
    let n_hard = inst.hard.len();
    let offset = match repr {
        Representation::Vig => 0,
        Representation::Cvig => inst.n_vars as usize,
        Representation::Res => 0,
    };
    let community_of = |j: usize, c: &Clause| -> usize {
        match repr {
            Representation::Vig => plurality(c, ca).unwrap_or(0),
            _ => ca.map[offset + j],
        }
    };
    let raw: Vec<usize> = inst
        .soft
        .iter()
        .enumerate()
        .map(|(i, s)| community_of(n_hard + i, &s.clause))
        .collect();
    let (labels, lookup) = renumber(&raw);
    let hard_labels = inst
        .hard
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let r = community_of(j, c);
            match lookup.get(r) {
                Some(&l) if l > 0 => l,
                _ => 1,
            }
        })
        .collect();
    build(inst, labels, hard_labels)
}

/// Assigns each soft clause to one of `k` buckets uniformly at random and
/// drops the empty buckets.
pub fn random_partition(inst: &MaxSatInstance, k: u32, seed: u64) -> PartitionedInstance {
    let k = k.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<usize> = inst.soft.iter().map(|_| rng.gen_range(0..k) as usize).collect();
    let (labels, _) = renumber(&raw);
    build(inst, labels, Vec::new())
}

/// Builds the `repr` graph, finds its communities and derives partitions.
pub fn partition_by_graph(
    inst: &MaxSatInstance,
    repr: Representation,
    seed: u64,
    pair_cap: usize,
) -> Result<PartitionedInstance, GraphTooLarge> {
    let g = build_graph(inst, repr, pair_cap)?;
    if g.is_empty() {
        return Ok(PartitionedInstance::single(inst.clone()));
    }
    let ca = detect_communities(&g, seed);
    Ok(derive_partitions(inst, &ca, repr))
}
