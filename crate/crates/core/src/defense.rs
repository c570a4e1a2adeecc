//! Low-rank adjacency filtering.
//!
//! The adjacency is symmetric, so its singular values are the absolute
//! eigenvalues and the truncated SVD is `sum_{i <= k} lambda_i v_i v_i^T` over
//! the `k` eigenpairs of largest `|lambda|`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Label};
use crate::oracle::Classifier;

const EIGEN_EPS: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowRankConfig {
    /// Fraction of the largest singular values to keep, in `(0, 1]`.
    pub gamma: f64,
    pub binarize_threshold: f64,
}

impl LowRankConfig {
    pub fn new(gamma: f64) -> Result<Self> {
        let cfg = Self {
            gamma,
            binarize_threshold: 0.5,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "gamma {} outside (0, 1]",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Number of singular values kept for an `n`-node graph.
    pub fn rank(&self, n: usize) -> usize {
        ((self.gamma * n as f64).round() as usize).clamp(1, n.max(1))
    }
}

/// Singular values of the adjacency in descending order.
pub fn singular_values(a: &Graph) -> Vec<f64> {
    if a.n_nodes() == 0 {
        return Vec::new();
    }
    let eig = decompose(&a.dense());
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|x| x.abs()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn decompose(m: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .unwrap_or_else(|| SymmetricEigen::new(m.clone()))
}

/// Real-valued rank-`k` reconstruction of the adjacency.
pub fn low_rank_reconstruct(a: &Graph, k: usize) -> DMatrix<f64> {
    let n = a.n_nodes();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let eig = decompose(&a.dense());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .abs()
            .total_cmp(&eig.eigenvalues[i].abs())
            .then(i.cmp(&j))
    });
    let mut out = DMatrix::zeros(n, n);
    for &i in order.iter().take(k.min(n)) {
        let v = eig.eigenvectors.column(i);
        out += eig.eigenvalues[i] * v * v.transpose();
    }
    out
}

/// Keeps the top `round(gamma * N)` singular components (at least one),
/// re-binarizes at the threshold, symmetrizes by OR and clears the diagonal.
pub fn low_rank_filter(a: &Graph, cfg: &LowRankConfig) -> Graph {
    let n = a.n_nodes();
    if n < 2 {
        return a.clone();
    }
    let recon = low_rank_reconstruct(a, cfg.rank(n));
    let mut out = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            let on =
                recon[(i, j)] >= cfg.binarize_threshold || recon[(j, i)] >= cfg.binarize_threshold;
            if on {
                out.set_edge(i, j, true);
            }
        }
    }
    if let Some(x) = a.features() {
        out = out.with_features(x.clone()).expect("same node count");
    }
    out.set_label(a.label());
    out
}

/// Classifier that low-rank filters every input before delegating.
pub struct Defended<C> {
    inner: C,
    cfg: LowRankConfig,
}

impl<C: Classifier> Defended<C> {
    pub fn new(inner: C, cfg: LowRankConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { inner, cfg })
    }
}

impl<C: Classifier> Classifier for Defended<C> {
    fn classify(&self, graph: &Graph) -> Result<Label> {
        self.inner.classify(&low_rank_filter(graph, &self.cfg))
    }
}

/// Wraps a classifier with the low-rank filter. Wrap the result in a
/// [`HardLabelOracle`](crate::oracle::HardLabelOracle) to count queries.
pub fn defended_classifier<C: Classifier>(inner: C, cfg: LowRankConfig) -> Result<Defended<C>> {
    Defended::new(inner, cfg)
}
