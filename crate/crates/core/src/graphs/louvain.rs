use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::WeightedGraph;

/// Community of every node plus the modularity of the split.
#[derive(Clone, Debug, PartialEq)]
pub struct CommunityAssignment {
    /// Community id per node; ids are contiguous from 0 in order of first node.
    pub map: Vec<usize>,
    pub modularity: f64,
    /// Modularity after each aggregation level, starting from singletons.
    pub history: Vec<f64>,
}

impl CommunityAssignment {
    pub fn num_communities(&self) -> usize {
        self.map.iter().max().map_or(0, |&m| m + 1)
    }

    /// Node ids of every community.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_communities()];
        for (node, &c) in self.map.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// `Q = sum_c [ in_c / 2m - (tot_c / 2m)^2 ]`, or 0 for a graph without edges.
pub fn modularity(g: &WeightedGraph, map: &[usize]) -> f64 {
    let m2 = 2.0 * g.total_weight();
    if m2 == 0.0 {
        return 0.0;
    }
    let k = map.iter().max().map_or(0, |&m| m + 1);
    let mut inside = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for (u, v, w) in g.edges() {
        tot[map[u]] += w;
        tot[map[v]] += w;
        if map[u] == map[v] {
            inside[map[u]] += 2.0 * w;
        }
    }
    (0..k)
        .map(|c| inside[c] / m2 - (tot[c] / m2).powi(2))
        .sum()
}

/// Aggregated graph used between Louvain levels.
struct Net {
    adj: Vec<Vec<(usize, f64)>>,
    /// Self-loop weight per node, each loop counted once.
    loops: Vec<f64>,
}

impl Net {
    fn from_graph(g: &WeightedGraph) -> Net {
        Net {
            adj: (0..g.num_nodes()).map(|i| g.neighbors(i).to_vec()).collect(),
            loops: vec![0.0; g.num_nodes()],
        }
    }

    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|e| e.1).sum::<f64>() + 2.0 * self.loops[i]
    }

    fn aggregate(&self, comm: &[usize], k: usize) -> Net {
        let mut loops = vec![0.0; k];
        let mut between = std::collections::BTreeMap::new();
        for (i, list) in self.adj.iter().enumerate() {
            loops[comm[i]] += self.loops[i];
            for &(j, w) in list {
                if i >= j {
                    continue;
                }
                let (a, b) = (comm[i], comm[j]);
                if a == b {
                    loops[a] += w;
                } else {
                    *between.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
                }
            }
        }
        let mut adj = vec![Vec::new(); k];
        for ((a, b), w) in between {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        Net { adj, loops }
    }
}

const EPS: f64 = 1e-12;

/// One local-moving phase. Returns the community of each node and whether any node moved.
fn local_moves(net: &Net, m2: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = net.adj.len();
    let degree: Vec<f64> = (0..n).map(|i| net.degree(i)).collect();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut link = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any = false;
    loop {
        let mut moved = false;
        for &i in &order {
            for &(j, w) in &net.adj[i] {
                let c = comm[j];
                if link[c] == 0.0 {
                    touched.push(c);
                }
                link[c] += w;
            }
            let old = comm[i];
            tot[old] -= degree[i];
            let gain = |c: usize, link: &[f64]| link[c] - tot[c] * degree[i] / m2;
            let mut best = old;
            let mut best_gain = gain(old, &link);
            touched.sort_unstable();
            for &c in &touched {
                let g = gain(c, &link);
                if g > best_gain + EPS {
                    best = c;
                    best_gain = g;
                }
            }
            tot[best] += degree[i];
            comm[i] = best;
            if best != old {
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any = true;
    }
    (comm, any)
}

/// Renumbers ids to `0..k` in order of first appearance.
fn compact(comm: &mut [usize]) -> usize {
    let mut ids = vec![usize::MAX; comm.len().max(comm.iter().max().map_or(0, |&m| m + 1))];
    let mut next = 0;
    for c in comm.iter_mut() {
        if ids[*c] == usize::MAX {
            ids[*c] = next;
            next += 1;
        }
        *c = ids[*c];
    }
    next
}

/// Louvain modularity maximization with resolution 1. Node visit order is
/// ascending id shuffled by `seed`.
pub fn detect_communities(g: &WeightedGraph, seed: u64) -> CommunityAssignment {
    let n = g.num_nodes();
    let singletons: Vec<usize> = (0..n).collect();
    let m2 = 2.0 * g.total_weight();
    if m2 == 0.0 {
        return CommunityAssignment {
            map: singletons,
            modularity: 0.0,
            history: vec![0.0],
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map = singletons;
    let mut history = vec![modularity(g, &map)];
    let mut net = Net::from_graph(g);
    loop {
        let (mut comm, moved) = local_moves(&net, m2, &mut rng);
        if !moved {
            break;
        }
        let k = compact(&mut comm);
        for c in map.iter_mut() {
            *c = comm[*c];
        }
        history.push(modularity(g, &map));
        if k == net.adj.len() {
            break;
        }
        net = net.aggregate(&comm, k);
    }
    compact(&mut map);
    CommunityAssignment {
        modularity: modularity(g, &map),
        map,
        history,
    }
}
