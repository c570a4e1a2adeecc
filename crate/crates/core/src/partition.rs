//! Louvain communities and the supernode / superlink decomposition used by
//! coarse-grained search.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{slot_index, Graph};

/// Stop aggregating once a level improves modularity by less than this.
const MIN_LEVEL_GAIN: f64 = 1e-7;
const GAIN_EPS: f64 = 1e-12;

/// Node-to-cluster assignment with contiguous cluster ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Relabels arbitrary cluster tags to `0..k` in order of first appearance.
    pub fn from_assignment(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        let mut sizes = Vec::new();
        for &tag in raw {
            let next = map.len();
            let id = *map.entry(tag).or_insert(next);
            if id == sizes.len() {
                sizes.push(0);
            }
            sizes[id] += 1;
            assignment.push(id);
        }
        Self { assignment, sizes }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_assignment(&(0..n).collect::<Vec<_>>())
    }

    pub fn n_nodes(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.sizes.len()
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.n_nodes())
            .filter(|&v| self.assignment[v] == cluster)
            .collect()
    }
}

/// Newman modularity of `p` on `g` at resolution 1.
pub fn modularity(g: &Graph, p: &Partition) -> f64 {
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = p.n_clusters();
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for (i, j) in g.edges() {
        let (ci, cj) = (p.cluster_of(i), p.cluster_of(j));
        degree[ci] += 1.0;
        degree[cj] += 1.0;
        if ci == cj {
            internal[ci] += 1.0;
        }
    }
    internal
        .iter()
        .zip(&degree)
        .map(|(l, d)| l / m - (d / (2.0 * m)).powi(2))
        .sum()
}

/// Weighted graph at one Louvain aggregation level.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_weight: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Self {
        let n = g.n_nodes();
        let mut adj = vec![Vec::new(); n];
        for (i, j) in g.edges() {
            adj[i].push((j, 1.0));
            adj[j].push((i, 1.0));
        }
        let degree = adj.iter().map(|a| a.len() as f64).collect();
        Self {
            adj,
            self_weight: vec![0.0; n],
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Local moving phase. Returns the community of each node and whether any
    /// node moved.
    fn local_moves(&self, m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut total: Vec<f64> = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let home = comm[i];
                let k_i = self.degree[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                total[home] -= k_i;

                let gain = |c: usize, link_c: f64| link_c - total[c] * k_i / (2.0 * m);
                let stay = gain(home, link[home]);
                let mut best = home;
                let mut best_gain = f64::NEG_INFINITY;
                touched.sort_unstable();
                for &c in &touched {
                    let g = gain(c, link[c]);
                    if g > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                if best_gain <= stay + GAIN_EPS {
                    best = home;
                }
                total[best] += k_i;
                if best != home {
                    comm[i] = best;
                    moved = true;
                    any_move = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        (comm, any_move)
    }

    /// Contracts communities (already contiguous) into single nodes.
    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        let mut self_weight = vec![0.0; k];
        let mut degree = vec![0.0; k];
        for i in 0..self.len() {
            let ci = comm[i];
            self_weight[ci] += self.self_weight[i];
            degree[ci] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                if j < i {
                    continue;
                }
                let cj = comm[j];
                if ci == cj {
                    self_weight[ci] += w;
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                    *weights[cj].entry(ci).or_default() += w;
                }
            }
        }
        Level {
            adj: weights
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect(),
            self_weight,
            degree,
        }
    }
}

/// Louvain result together with the modularity after each level; entry 0 is
/// the singleton partition.
#[derive(Debug, Clone)]
pub struct LouvainTrace {
    pub partition: Partition,
    pub modularity: Vec<f64>,
}

/// Two-phase Louvain modularity maximisation. Node visit order is shuffled
/// with `seed`; equal-gain moves prefer the lowest community id.
pub fn louvain(g: &Graph, seed: u64) -> Partition {
    louvain_with_trace(g, seed).partition
}

pub fn louvain_with_trace(g: &Graph, seed: u64) -> LouvainTrace {
    let n = g.n_nodes();
    let mut partition = Partition::singletons(n);
    let mut trace = vec![modularity(g, &partition)];
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return LouvainTrace {
            partition,
            modularity: trace,
        };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(g);
    let mut node_comm: Vec<usize> = (0..n).collect();
    loop {
        let (comm, moved) = level.local_moves(m, &mut rng);
        if !moved {
            break;
        }
        let relabeled = Partition::from_assignment(&comm);
        let candidate: Vec<usize> = node_comm.iter().map(|&c| relabeled.cluster_of(c)).collect();
        let next = Partition::from_assignment(&candidate);
        let q = modularity(g, &next);
        let prev = *trace.last().unwrap();
        if q < prev {
            break;
        }
        trace.push(q);
        partition = next;
        node_comm = candidate;
        if q - prev < MIN_LEVEL_GAIN {
            break;
        }
        level = level.aggregate(relabeled.assignment(), relabeled.n_clusters());
    }
    LouvainTrace {
        partition,
        modularity: trace,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Supernode(usize),
    Superlink(usize, usize),
    WholeGraph,
}

impl ComponentKind {
    pub fn phase(&self) -> SearchPhase {
        match self {
            ComponentKind::Supernode(_) => SearchPhase::Supernode,
            ComponentKind::Superlink(..) => SearchPhase::Superlink,
            ComponentKind::WholeGraph => SearchPhase::WholeGraph,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchPhase {
    Supernode,
    Superlink,
    WholeGraph,
}

impl fmt::Display for SearchPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchPhase::Supernode => "supernode",
            SearchPhase::Superlink => "superlink",
            SearchPhase::WholeGraph => "whole_graph",
        })
    }
}

/// A searchable block of edge slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperComponent {
    pub kind: ComponentKind,
    pub slots: Vec<usize>,
    /// Nodes touched by the component's slots.
    pub n_nodes: usize,
}

/// Order in which coarse-grained search visits component types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Strategy {
    /// Supernodes, superlinks, whole graph.
    #[default]
    I,
    /// Superlinks, supernodes, whole graph.
    II,
    /// Whole graph only.
    III,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" | "i" => Ok(Strategy::I),
            "II" | "2" | "ii" => Ok(Strategy::II),
            "III" | "3" | "iii" => Ok(Strategy::III),
            other => Err(Error::InvalidParams(format!("unknown strategy {other:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::I => "I",
            Strategy::II => "II",
            Strategy::III => "III",
        })
    }
}

fn supernodes(p: &Partition) -> Vec<SuperComponent> {
    let n = p.n_nodes();
    let mut out: Vec<SuperComponent> = (0..p.n_clusters())
        .map(|c| {
            let members = p.members(c);
            let mut slots = Vec::new();
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    slots.push(slot_index(n, i, j));
                }
            }
            SuperComponent {
                kind: ComponentKind::Supernode(c),
                slots,
                n_nodes: members.len(),
            }
        })
        .filter(|c| !c.slots.is_empty())
        .collect();
    out.sort_by_key(|c| c.slots.len());
    out
}

fn superlinks(p: &Partition) -> Vec<SuperComponent> {
    let n = p.n_nodes();
    let members: Vec<Vec<usize>> = (0..p.n_clusters()).map(|c| p.members(c)).collect();
    let mut out = Vec::new();
    for c1 in 0..members.len() {
        for c2 in c1 + 1..members.len() {
            let mut slots = Vec::with_capacity(members[c1].len() * members[c2].len());
            for &i in &members[c1] {
                for &j in &members[c2] {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    slots.push(slot_index(n, a, b));
                }
            }
            slots.sort_unstable();
            out.push(SuperComponent {
                kind: ComponentKind::Superlink(c1, c2),
                slots,
                n_nodes: members[c1].len() + members[c2].len(),
            });
        }
    }
    out.sort_by_key(|c| c.slots.len());
    out
}

fn whole_graph(p: &Partition) -> Vec<SuperComponent> {
    let n = p.n_nodes();
    let s = crate::graph::slot_count(n);
    if s == 0 {
        return Vec::new();
    }
    vec![SuperComponent {
        kind: ComponentKind::WholeGraph,
        slots: (0..s).collect(),
        n_nodes: n,
    }]
}

/// Components in search order. Within a phase, smaller components come first.
pub fn enumerate_components(p: &Partition, strategy: Strategy) -> Vec<SuperComponent> {
    match strategy {
        Strategy::I => [supernodes(p), superlinks(p), whole_graph(p)].concat(),
        Strategy::II => [superlinks(p), supernodes(p), whole_graph(p)].concat(),
        Strategy::III => whole_graph(p),
    }
}

/// Exact search-space sizes for exhaustive search over supernodes, superlinks
/// and the whole graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpaceReport {
    pub node_space: BigUint,
    pub link_space: BigUint,
    pub graph_space: BigUint,
    pub log2_beta: f64,
    /// `graph_space / (node_space + link_space)`, `None` when it overflows `f64`.
    pub beta: Option<f64>,
}

pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().log2() + shift as f64
}

fn pow2(exp: usize) -> BigUint {
    BigUint::one() << exp
}

pub fn search_space_report(p: &Partition) -> SearchSpaceReport {
    let n = p.n_nodes();
    let d = p.sizes();
    let graph_space = pow2(n * n.saturating_sub(1) / 2);
    let node_space: BigUint = d
        .iter()
        .map(|&di| pow2(di * di.saturating_sub(1) / 2))
        .sum();
    // 1/2 * sum over ordered pairs == sum over unordered pairs.
    let mut link_space = BigUint::zero();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            link_space += pow2(d[i] * d[j]);
        }
    }
    let log2_beta = log2_big(&graph_space) - log2_big(&(&node_space + &link_space));
    let beta = (log2_beta < 1000.0).then(|| {
        let denom = &node_space + &link_space;
        match (graph_space.to_f64(), denom.to_f64()) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
            _ => log2_beta.exp2(),
        }
    });
    SearchSpaceReport {
        node_space,
        link_space,
        graph_space,
        log2_beta,
        beta,
    }
}
