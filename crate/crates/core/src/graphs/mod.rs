//! Graph representations of a formula and community-based soft partitions.
//!
//! Clause nodes are numbered in [`MaxSatInstance::clauses`] order: hard
//! clauses first, then soft clauses.

mod louvain;
mod partition;

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::cnf::{resolve, MaxSatInstance, Resolvent, Var};

pub use louvain::{detect_communities, modularity, CommunityAssignment};
pub use partition::{derive_partitions, partition_by_graph, random_partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Variable(Var),
    /// Index into the instance's clauses, hard first.
    Clause(usize),
}

/// Undirected graph with positive edge weights and no self-loops.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightedGraph {
    nodes: Vec<NodeKind>,
    adj: Vec<Vec<(usize, f64)>>,
    n_edges: usize,
}

impl WeightedGraph {
    /// Builds from accumulated `(u, v) -> weight` entries with `u < v`.
    fn from_weights(nodes: Vec<NodeKind>, weights: HashMap<(usize, usize), f64>) -> WeightedGraph {
        let mut edges: Vec<((usize, usize), f64)> = weights.into_iter().collect();
        edges.sort_by_key(|e| e.0);
        let mut adj = vec![Vec::new(); nodes.len()];
        for &((u, v), w) in &edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for list in &mut adj {
            list.sort_by_key(|e| e.0);
        }
        WeightedGraph {
            nodes,
            adj,
            n_edges: edges.len(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.n_edges
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> NodeKind {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[NodeKind] {
        &self.nodes
    }

    /// Neighbours of `id` with edge weights, by ascending id.
    pub fn neighbors(&self, id: usize) -> &[(usize, f64)] {
        &self.adj[id]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u]
            .binary_search_by(|e| e.0.cmp(&v))
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|e| e.2).sum()
    }

    /// One `u v weight` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v, w) in self.edges() {
            let _ = writeln!(out, "{u} {v} {w}");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    Vig,
    Cvig,
    Res,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::Vig => "vig",
            Representation::Cvig => "cvig",
            Representation::Res => "res",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown graph representation `{0}` (expected vig, cvig or res)")]
pub struct UnknownRepresentation(pub String);

impl FromStr for Representation {
    type Err = UnknownRepresentation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vig" => Ok(Representation::Vig),
            "cvig" => Ok(Representation::Cvig),
            "res" => Ok(Representation::Res),
            _ => Err(UnknownRepresentation(s.to_string())),
        }
    }
}

/// Default bound on clause pairs examined by [`build_res`].
pub const DEFAULT_PAIR_CAP: usize = 20_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("resolution graph needs more than {cap} clause-pair checks")]
pub struct GraphTooLarge {
    pub cap: usize,
}

/// Variable incidence graph: each clause over `n >= 2` variables adds
/// `1 / C(n, 2)` to every pair of its variables.
pub fn build_vig(inst: &MaxSatInstance) -> WeightedGraph {
    let nodes = (1..=inst.n_vars).map(|v| NodeKind::Variable(Var::new(v))).collect();
    let mut weights = HashMap::new();
    for c in inst.clauses() {
        let vars: Vec<usize> = c.vars().map(|v| v.slot()).collect();
        let n = vars.len();
        if n < 2 {
            continue;
        }
        let w = 2.0 / (n * (n - 1)) as f64;
        for (a, &x) in vars.iter().enumerate() {
            for &y in &vars[a + 1..] {
                *weights.entry((x.min(y), x.max(y))).or_insert(0.0) += w;
            }
        }
    }
    WeightedGraph::from_weights(nodes, weights)
}

/// Clause-variable incidence graph: variables are nodes `0..n_vars`, clause
/// `j` is node `n_vars + j`, and each occurrence adds an edge of weight `1/|c|`.
pub fn build_cvig(inst: &MaxSatInstance) -> WeightedGraph {
    let n = inst.n_vars as usize;
    let mut nodes: Vec<NodeKind> = (1..=inst.n_vars).map(|v| NodeKind::Variable(Var::new(v))).collect();
    let mut weights = HashMap::new();
    for (j, c) in inst.clauses().enumerate() {
        nodes.push(NodeKind::Clause(j));
        let w = 1.0 / c.len() as f64;
        for v in c.vars() {
            weights.insert((v.slot(), n + j), w);
        }
    }
    WeightedGraph::from_weights(nodes, weights)
}

/// Resolution graph: clauses that clash on exactly one variable are joined
/// with weight `1/|resolvent|`. An empty resolvent counts as size 1.
pub fn build_res(inst: &MaxSatInstance, pair_cap: usize) -> Result<WeightedGraph, GraphTooLarge> {
    let clauses: Vec<_> = inst.clauses().collect();
    let nodes = (0..clauses.len()).map(NodeKind::Clause).collect();
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); 2 * inst.n_vars as usize];
    for (j, c) in clauses.iter().enumerate() {
        for l in c.lits() {
            occurs[l.code()].push(j);
        }
    }
    let mut weights = HashMap::new();
    let mut examined = 0usize;
    let mut partners = Vec::new();
    for (j, c) in clauses.iter().enumerate() {
        partners.clear();
        for l in c.lits() {
            partners.extend(occurs[(!*l).code()].iter().copied().filter(|&k| k > j));
        }
        partners.sort_unstable();
        partners.dedup();
        examined += partners.len();
        if examined > pair_cap {
            return Err(GraphTooLarge { cap: pair_cap });
        }
        for &k in &partners {
            let d = clauses[k];
            let mut clash = c.lits().iter().filter(|&&l| d.contains(!l));
            let (Some(first), None) = (clash.next(), clash.next()) else {
                continue;
            };
            match resolve(c, d, first.var()).expect("clauses clash") {
                Resolvent::Clause(r) => {
                    weights.insert((j, k), 1.0 / r.len().max(1) as f64);
                }
                Resolvent::Tautology => {}
            }
        }
    }
    Ok(WeightedGraph::from_weights(nodes, weights))
}

pub fn build_graph(
    inst: &MaxSatInstance,
    repr: Representation,
    pair_cap: usize,
) -> Result<WeightedGraph, GraphTooLarge> {
    match repr {
        Representation::Vig => Ok(build_vig(inst)),
        Representation::Cvig => Ok(build_cvig(inst)),
        Representation::Res => build_res(inst, pair_cap),
    }
}
