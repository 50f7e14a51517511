use std::fmt::Write as _;

use super::{content_lines, number, syntax, EncodeError, SchemeChoice};
use crate::cnf::{Clause, Lit, MaxSatInstance, Model, PartitionedInstance, SoftClause, Var};

/// Minimum sum coloring: color every vertex so adjacent vertices differ,
/// minimizing the sum of color indices (colors are numbered from 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MscProblem {
    pub n_vertices: usize,
    /// Undirected edges `(u, v)` with `u < v`, 0-based, sorted and unique.
    pub edges: Vec<(usize, usize)>,
    pub n_colors: usize,
}

impl MscProblem {
    pub fn new(
        n_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        n_colors: usize,
    ) -> Result<MscProblem, EncodeError> {
        if n_colors == 0 {
            return Err(EncodeError::NoColors);
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(EncodeError::SelfLoop(u));
            }
            if let Some(bad) = [u, v].into_iter().find(|&x| x >= n_vertices) {
                return Err(EncodeError::VertexOutOfRange {
                    vertex: bad,
                    n: n_vertices,
                });
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        list.dedup();
        Ok(MscProblem {
            n_vertices,
            edges: list,
            n_colors,
        })
    }

    /// Variable `X_v^c` (both 0-based).
    pub fn var(&self, v: usize, c: usize) -> Var {
        Var::new((v * self.n_colors + c + 1) as u32)
    }

    /// `p msc <vertices> <colors>` then one `e u v` line per edge, 1-based.
    pub fn parse(text: &str) -> Result<MscProblem, EncodeError> {
        let mut lines = content_lines(text);
        let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
        let mut h = header.split_whitespace();
        if (h.next(), h.next()) != (Some("p"), Some("msc")) {
            return Err(syntax(hl, "expected `p msc <vertices> <colors>`"));
        }
        let n = number(h.next(), hl, "vertex count")?;
        let colors = number(h.next(), hl, "color count")?;
        let mut edges = Vec::new();
        for (ln, line) in lines {
            let mut t = line.split_whitespace();
            if t.next() != Some("e") {
                return Err(syntax(ln, "expected `e u v`"));
            }
            let u = number(t.next(), ln, "vertex")?;
            let v = number(t.next(), ln, "vertex")?;
            if u == 0 || v == 0 {
                return Err(syntax(ln, "vertices are numbered from 1"));
            }
            edges.push((u - 1, v - 1));
        }
        MscProblem::new(n, edges, colors)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p msc {} {}\n", self.n_vertices, self.n_colors);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }
}

fn clause(lits: impl IntoIterator<Item = Lit>) -> Clause {
    Clause::new(lits).expect("encoding clauses are not tautological")
}

/// Hard: every vertex takes at least one and at most one color (pairwise),
/// adjacent vertices never share a color. Soft: `!X_v^c` with weight `c`.
///
/// Partitions: one per vertex, one per color, or a single block.
pub fn encode_msc(p: &MscProblem, scheme: SchemeChoice) -> Result<PartitionedInstance, EncodeError> {
    let (n_part, soft_label): (usize, Box<dyn Fn(usize, usize) -> u32>) = match scheme {
        SchemeChoice::None => (1, Box::new(|_, _| 1)),
        SchemeChoice::MscVertex => (p.n_vertices, Box::new(|v, _| v as u32 + 1)),
        SchemeChoice::MscColor => (p.n_colors, Box::new(|_, c| c as u32 + 1)),
        other => {
            return Err(EncodeError::SchemeMismatch {
                scheme: other,
                problem: "coloring",
            })
        }
    };
    let mut hard = Vec::new();
    let mut hard_labels = Vec::new();
    for v in 0..p.n_vertices {
        hard.push(clause((0..p.n_colors).map(|c| p.var(v, c).pos())));
        hard_labels.push(soft_label(v, 0));
        for c1 in 0..p.n_colors {
            for c2 in c1 + 1..p.n_colors {
                hard.push(clause([p.var(v, c1).neg(), p.var(v, c2).neg()]));
                hard_labels.push(soft_label(v, c1));
            }
        }
    }
    for &(u, v) in &p.edges {
        for c in 0..p.n_colors {
            hard.push(clause([p.var(u, c).neg(), p.var(v, c).neg()]));
            hard_labels.push(soft_label(u, c));
        }
    }
    let mut soft = Vec::new();
    for v in 0..p.n_vertices {
        for c in 0..p.n_colors {
            soft.push(
                SoftClause::new(clause([p.var(v, c).neg()]), c as u64 + 1)
                    .with_partition(soft_label(v, c)),
            );
        }
    }
    let top = soft.iter().map(|s| s.weight).sum::<u64>() + 1;
    let base = MaxSatInstance {
        n_vars: (p.n_vertices * p.n_colors) as u32,
        hard,
        soft,
        top,
    };
    Ok(PartitionedInstance {
        base,
        n_part: n_part.max(1) as u32,
        hard_labels,
    })
}

/// Color (0-based) of every vertex, if `model` encodes a proper coloring.
pub fn decode_coloring(p: &MscProblem, model: &Model) -> Option<Vec<usize>> {
    let colors: Vec<usize> = (0..p.n_vertices)
        .map(|v| {
            let set: Vec<usize> = (0..p.n_colors).filter(|&c| model.value(p.var(v, c))).collect();
            match set.as_slice() {
                [c] => Some(*c),
                _ => None,
            }
        })
        .collect::<Option<_>>()?;
    p.edges
        .iter()
        .all(|&(u, v)| colors[u] != colors[v])
        .then_some(colors)
}
