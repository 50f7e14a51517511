use std::fmt::Write as _;

use super::{content_lines, number, syntax, EncodeError, SchemeChoice};
use crate::cnf::{Clause, MaxSatInstance, Model, PartitionedInstance, SoftClause, Var, VarAllocator};
use crate::encodings::{encode_at_least_k, encode_at_most_k, encode_exactly_one};

/// Seat every person at one table, with between `min` and `max` persons per
/// table, minimizing the number of distinct tags summed over tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeatingProblem {
    /// Tag ids (0-based, below `n_tags`) of each person.
    pub persons: Vec<Vec<usize>>,
    pub n_tags: usize,
    pub n_tables: usize,
    pub min: usize,
    pub max: usize,
}

impl SeatingProblem {
    pub fn new(
        persons: Vec<Vec<usize>>,
        n_tags: usize,
        n_tables: usize,
        min: usize,
        max: usize,
    ) -> Result<SeatingProblem, EncodeError> {
        if n_tables == 0 {
            return Err(EncodeError::NoTables);
        }
        let mut persons = persons;
        for tags in &mut persons {
            if let Some(&tag) = tags.iter().find(|&&t| t >= n_tags) {
                return Err(EncodeError::TagOutOfRange { tag, n: n_tags });
            }
            tags.sort_unstable();
            tags.dedup();
        }
        Ok(SeatingProblem {
            persons,
            n_tags,
            n_tables,
            min,
            max,
        })
    }

    /// Whether `n_tables * min <= |P| <= n_tables * max` and `min <= max`.
    pub fn is_feasible(&self) -> bool {
        let n = self.persons.len();
        self.min <= self.max && self.n_tables * self.min <= n && n <= self.n_tables * self.max
    }

    /// Variable `X_t^p`: person `p` sits at table `t`.
    pub fn seat(&self, p: usize, t: usize) -> Var {
        Var::new((p * self.n_tables + t + 1) as u32)
    }

    /// Variable `Y_t^g`: some person at table `t` has tag `g`.
    pub fn tag(&self, t: usize, g: usize) -> Var {
        let base = self.persons.len() * self.n_tables;
        Var::new((base + g * self.n_tables + t + 1) as u32)
    }

    /// `p seating <persons> <tables> <min> <max> <tags>` then one
    /// `u <tag>*` line per person with 1-based tag ids.
    pub fn parse(text: &str) -> Result<SeatingProblem, EncodeError> {
        let mut lines = content_lines(text);
        let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
        let mut h = header.split_whitespace();
        if (h.next(), h.next()) != (Some("p"), Some("seating")) {
            return Err(syntax(
                hl,
                "expected `p seating <persons> <tables> <min> <max> <tags>`",
            ));
        }
        let n = number(h.next(), hl, "person count")?;
        let tables = number(h.next(), hl, "table count")?;
        let min = number(h.next(), hl, "minimum")?;
        let max = number(h.next(), hl, "maximum")?;
        let n_tags = number(h.next(), hl, "tag count")?;
        let mut persons = Vec::new();
        let mut last = hl;
        for (ln, line) in lines {
            last = ln;
            let mut t = line.split_whitespace();
            if t.next() != Some("u") {
                return Err(syntax(ln, "expected `u <tag>*`"));
            }
            let mut tags = Vec::new();
            for tok in t {
                let g = number(Some(tok), ln, "tag")?;
                if g == 0 {
                    return Err(syntax(ln, "tags are numbered from 1"));
                }
                tags.push(g - 1);
            }
            persons.push(tags);
        }
        if persons.len() != n {
            return Err(syntax(
                last,
                format!("header declares {n} persons, body has {}", persons.len()),
            ));
        }
        SeatingProblem::new(persons, n_tags, tables, min, max)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "p seating {} {} {} {} {}\n",
            self.persons.len(),
            self.n_tables,
            self.min,
            self.max,
            self.n_tags
        );
        for tags in &self.persons {
            out.push('u');
            for g in tags {
                let _ = write!(out, " {}", g + 1);
            }
            out.push('\n');
        }
        out
    }
}

/// Hard: each person at exactly one table, each table seats between `min`
/// and `max` persons (sequential counters), and `!X_t^p | Y_t^g` for every
/// tag `g` of `p`. Soft: `!Y_t^g` with weight 1 for every table and tag.
///
/// Partitions: one per tag, one per table, or a single block.
pub fn encode_seating(
    p: &SeatingProblem,
    scheme: SchemeChoice,
) -> Result<PartitionedInstance, EncodeError> {
    let (n_part, label): (usize, Box<dyn Fn(usize, usize) -> u32>) = match scheme {
        SchemeChoice::None => (1, Box::new(|_, _| 1)),
        SchemeChoice::SeatTags => (p.n_tags, Box::new(|_, g| g as u32 + 1)),
        SchemeChoice::SeatTables => (p.n_tables, Box::new(|t, _| t as u32 + 1)),
        other => {
            return Err(EncodeError::SchemeMismatch {
                scheme: other,
                problem: "seating",
            })
        }
    };
    let n_persons = p.persons.len();
    let n_base = (n_persons * p.n_tables + p.n_tags * p.n_tables) as u32;
    let mut alloc = VarAllocator::new(n_base);
    let mut hard = Vec::new();
    let mut hard_labels = Vec::new();
    let mut push = |clauses: Vec<Clause>, l: u32, hard: &mut Vec<Clause>| {
        hard_labels.extend(std::iter::repeat_n(l, clauses.len()));
        hard.extend(clauses);
    };
    for q in 0..n_persons {
        let seats: Vec<_> = (0..p.n_tables).map(|t| p.seat(q, t).pos()).collect();
        let first_tag = p.persons[q].first().copied().unwrap_or(0);
        push(encode_exactly_one(&seats, &mut alloc), label(0, first_tag), &mut hard);
    }
    for t in 0..p.n_tables {
        let seated: Vec<_> = (0..n_persons).map(|q| p.seat(q, t).pos()).collect();
        push(encode_at_most_k(&seated, p.max, &mut alloc), label(t, 0), &mut hard);
        push(encode_at_least_k(&seated, p.min, &mut alloc), label(t, 0), &mut hard);
        for (q, tags) in p.persons.iter().enumerate() {
            for &g in tags {
                let c = Clause::new([p.seat(q, t).neg(), p.tag(t, g).pos()]).expect("distinct vars");
                push(vec![c], label(t, g), &mut hard);
            }
        }
    }
    let mut soft = Vec::new();
    for t in 0..p.n_tables {
        for g in 0..p.n_tags {
            let c = Clause::new([p.tag(t, g).neg()]).expect("unit");
            soft.push(SoftClause::new(c, 1).with_partition(label(t, g)));
        }
    }
    let base = MaxSatInstance {
        n_vars: alloc.max_var(),
        hard,
        soft,
        top: (p.n_tables * p.n_tags) as u64 + 1,
    };
    Ok(PartitionedInstance {
        base,
        n_part: n_part.max(1) as u32,
        hard_labels,
    })
}

/// Table of every person, if `model` encodes a seating within the bounds.
pub fn decode_seating(p: &SeatingProblem, model: &Model) -> Option<Vec<usize>> {
    let tables: Vec<usize> = (0..p.persons.len())
        .map(|q| {
            let set: Vec<usize> = (0..p.n_tables).filter(|&t| model.value(p.seat(q, t))).collect();
            match set.as_slice() {
                [t] => Some(*t),
                _ => None,
            }
        })
        .collect::<Option<_>>()?;
    (0..p.n_tables)
        .all(|t| {
            let n = tables.iter().filter(|&&x| x == t).count();
            p.min <= n && n <= p.max
        })
        .then_some(tables)
}
