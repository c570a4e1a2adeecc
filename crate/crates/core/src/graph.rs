//! Undirected simple graphs over upper-triangular edge slots, the perturbation
//! vector that lives on those slots, and the flip function tying them together.
//!
//! A graph on `N` nodes has `S = N(N-1)/2` slots. Slot `k` corresponds to the
//! pair `(i, j)` with `i < j`, enumerated row-major over the upper triangle:
//! `(0,1), (0,2), ..., (0,N-1), (1,2), ...`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type Label = usize;

/// Default flip threshold: a slot flips when its weight reaches one half.
pub const FLIP_THRESHOLD: f64 = 0.5;

pub fn slot_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Flat slot index of the pair `(i, j)`, `i < j < n`.
#[inline]
pub fn slot_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`slot_index`].
pub fn slot_pair(n: usize, k: usize) -> (usize, usize) {
    debug_assert!(k < slot_count(n));
    let mut rest = k;
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if rest < row {
            return (i, i + 1 + rest);
        }
        rest -= row;
        i += 1;
    }
}

/// Precomputed bijection between node pairs and slots for a fixed `n`.
#[derive(Debug, Clone)]
pub struct EdgeIndexMap {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl EdgeIndexMap {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(slot_count(n));
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        Self { n, pairs }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn flatten(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        slot_index(self.n, a, b)
    }

    pub fn unflatten(&self, k: usize) -> (usize, usize) {
        self.pairs[k]
    }
}

/// An undirected simple graph stored as one bit per upper-triangular slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    slots: Vec<bool>,
    features: Option<DMatrix<f64>>,
    label: Option<Label>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            slots: vec![false; slot_count(n)],
            features: None,
            label: None,
        }
    }

    pub fn from_slots(n: usize, slots: Vec<bool>) -> Result<Self> {
        if slots.len() != slot_count(n) {
            return Err(Error::DimensionMismatch {
                expected: slot_count(n),
                actual: slots.len(),
            });
        }
        Ok(Self {
            n,
            slots,
            features: None,
            label: None,
        })
    }

    /// Builds a graph from an edge list. Duplicate and reciprocal pairs
    /// collapse into one edge; self-loops and out-of-range nodes are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParams(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidParams(format!("self-loop on node {a}")));
            }
            g.set_edge(a, b, true);
        }
        Ok(g)
    }

    /// Builds a graph from a dense symmetric 0/1 matrix.
    pub fn from_dense(adj: &DMatrix<f64>) -> Result<Self> {
        let n = adj.nrows();
        if adj.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "adjacency is {}x{}",
                adj.nrows(),
                adj.ncols()
            )));
        }
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if adj[(i, j)] != 0.0 || adj[(j, i)] != 0.0 {
                    g.set_edge(i, j, true);
                }
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        Self {
            n,
            slots: vec![true; slot_count(n)],
            features: None,
            label: None,
        }
    }

    pub fn with_features(mut self, features: DMatrix<f64>) -> Result<Self> {
        if features.nrows() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "feature matrix has {} rows for {} nodes",
                features.nrows(),
                self.n
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[bool] {
        &self.slots
    }

    pub fn features(&self) -> Option<&DMatrix<f64>> {
        self.features.as_ref()
    }

    pub fn label(&self) -> Option<Label> {
        self.label
    }

    pub fn set_label(&mut self, label: Option<Label>) {
        self.label = label;
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.slots[slot_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.slots[slot_index(self.n, j, i)],
            std::cmp::Ordering::Equal => false,
        }
    }

    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        assert_ne!(i, j, "self-loops are not representable");
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let k = slot_index(self.n, a, b);
        self.slots[k] = present;
    }

    pub fn flip_slot(&mut self, k: usize) {
        self.slots[k] = !self.slots[k];
    }

    pub fn edge_count(&self) -> usize {
        self.slots.iter().filter(|&&b| b).count()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| slot_pair(self.n, k))
            .collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for (i, j) in self.edges() {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, j) in self.edges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Full symmetric adjacency with zero diagonal.
    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (i, j) in self.edges() {
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
        }
        m
    }

    /// Relabels nodes: node `v` of `self` becomes node `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: perm.len(),
            });
        }
        let mut g = Self::empty(self.n);
        for (i, j) in self.edges() {
            g.set_edge(perm[i], perm[j], true);
        }
        if let Some(x) = &self.features {
            let mut y = DMatrix::zeros(x.nrows(), x.ncols());
            for (v, &target) in perm.iter().enumerate() {
                y.set_row(target, &x.row(v));
            }
            g.features = Some(y);
        }
        g.label = self.label;
        Ok(g)
    }

    /// Same topology with a different slot pattern; features and label carried over.
    fn with_slots(&self, slots: Vec<bool>) -> Self {
        Self {
            n: self.n,
            slots,
            features: self.features.clone(),
            label: self.label,
        }
    }

    fn check_same_size(&self, other: &Graph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(())
    }
}

/// A real-valued weight per edge slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationVector(Vec<f64>);

impl PerturbationVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// 1.0 on the given slots, 0.0 elsewhere.
    pub fn indicator(dim: usize, slots: &[usize]) -> Self {
        let mut v = vec![0.0; dim];
        for &k in slots {
            v[k] = 1.0;
        }
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|x| x * factor).collect())
    }

    /// Number of slots at or above `threshold`.
    pub fn count_at_least(&self, threshold: f64) -> usize {
        self.0.iter().filter(|&&x| x >= threshold).count()
    }
}

impl From<Vec<f64>> for PerturbationVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Returns `theta / ||theta||_2`.
pub fn normalize(theta: &PerturbationVector) -> Result<PerturbationVector> {
    let norm = theta.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(theta.scaled(1.0 / norm))
}

/// Flips every slot whose weight is at least `threshold`.
pub fn apply_perturbation(a: &Graph, theta: &PerturbationVector, threshold: f64) -> Result<Graph> {
    if theta.dim() != a.n_slots() {
        return Err(Error::DimensionMismatch {
            expected: a.n_slots(),
            actual: theta.dim(),
        });
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "flip threshold {threshold} outside (0, 1]"
        )));
    }
    let slots = a
        .slots
        .iter()
        .zip(theta.as_slice())
        .map(|(&bit, &w)| if w >= threshold { !bit } else { bit })
        .collect();
    Ok(a.with_slots(slots))
}

/// Flips the listed slots of `a`.
pub fn flip_slots(a: &Graph, slots: &[usize]) -> Graph {
    let mut g = a.clone();
    for &k in slots {
        g.flip_slot(k);
    }
    g
}

/// Number of slots where the two graphs differ.
pub fn flip_count(a: &Graph, b: &Graph) -> Result<usize> {
    a.check_same_size(b)?;
    Ok(a.slots.iter().zip(&b.slots).filter(|(x, y)| x != y).count())
}

/// `||A' - A||_0 / N(N-1)`, which equals flipped slots over `S`.
pub fn perturbation_rate(a: &Graph, perturbed: &Graph) -> Result<f64> {
    let flips = flip_count(a, perturbed)?;
    let s = a.n_slots();
    if s == 0 {
        return Ok(0.0);
    }
    Ok((2 * flips) as f64 / (a.n * (a.n - 1)) as f64)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlipLedger {
    pub added: Vec<(usize, usize)>,
    pub removed: Vec<(usize, usize)>,
}

impl FlipLedger {
    pub fn total(&self) -> usize {
        self.added.len() + self.removed.len()
    }
}

/// Splits the differing slots into added (0 -> 1) and removed (1 -> 0) edges.
pub fn flip_ledger(a: &Graph, perturbed: &Graph) -> Result<FlipLedger> {
    a.check_same_size(perturbed)?;
    let mut ledger = FlipLedger::default();
    for (k, (&before, &after)) in a.slots.iter().zip(&perturbed.slots).enumerate() {
        match (before, after) {
            (false, true) => ledger.added.push(slot_pair(a.n, k)),
            (true, false) => ledger.removed.push(slot_pair(a.n, k)),
            _ => {}
        }
    }
    Ok(ledger)
}
