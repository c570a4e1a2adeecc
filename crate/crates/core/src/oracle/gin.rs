//! Inference-only Graph Isomorphism Network.
//!
//! Layer `k` computes `h_v = ReLU(W_k ((1 + eps_k) h_v + sum_{u in N(v)} h_u) + b_k)`.
//! Each layer's node embeddings are sum-pooled into a graph embedding, passed
//! through that layer's readout map, and the per-layer logits are summed. The
//! predicted class is the arg-max logit (softmax does not change it), ties
//! going to the smallest class index.
//!
//! The readout list has either `K` entries (layers `1..=K`) or `K + 1`
//! entries, in which case the first one reads out the input features.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Classifier;
use crate::error::{Error, Result};
use crate::graph::{Graph, Label};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GinLayer {
    /// Row-major `out x in` weight matrix.
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GinReadout {
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GinWeights {
    pub layers: Vec<GinLayer>,
    pub readout: Vec<GinReadout>,
    pub classes: usize,
    pub feature_dim: usize,
}

fn to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::ShapeMismatch(format!("{what}: ragged rows")));
    }
    Ok(DMatrix::from_row_iterator(
        r,
        c,
        rows.iter().flatten().copied(),
    ))
}

/// Validated dense form used for inference.
#[derive(Debug, Clone)]
struct Compiled {
    layers: Vec<(DMatrix<f64>, DVector<f64>, f64)>,
    readout: Vec<(DMatrix<f64>, DVector<f64>)>,
    reads_input: bool,
    feature_dim: usize,
}

impl GinWeights {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let w: Self = serde_json::from_str(s)?;
        w.validate()?;
        Ok(w)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Untrained weights drawn from `N(0, 1/fan_in)` with a fixed seed.
    pub fn random(feature_dim: usize, hidden: &[usize], classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dense = |rows: usize, cols: usize| -> (Vec<Vec<f64>>, Vec<f64>) {
            let normal = Normal::new(0.0, 1.0 / (cols.max(1) as f64).sqrt()).unwrap();
            let w = (0..rows)
                .map(|_| (0..cols).map(|_| normal.sample(&mut rng)).collect())
                .collect();
            let b = (0..rows).map(|_| 0.1 * normal.sample(&mut rng)).collect();
            (w, b)
        };
        let mut layers = Vec::new();
        let mut readout = Vec::new();
        let (w, b) = dense(classes, feature_dim);
        readout.push(GinReadout { w, b });
        let mut input = feature_dim;
        for &width in hidden {
            let (w, b) = dense(width, input);
            layers.push(GinLayer { w, b, epsilon: 0.0 });
            let (w, b) = dense(classes, width);
            readout.push(GinReadout { w, b });
            input = width;
        }
        Self {
            layers,
            readout,
            classes,
            feature_dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.compile().map(|_| ())
    }

    fn compile(&self) -> Result<Compiled> {
        if self.classes == 0 {
            return Err(Error::ShapeMismatch("zero classes".into()));
        }
        let k = self.layers.len();
        let reads_input = match self.readout.len() {
            n if n == k + 1 => true,
            n if n == k && k > 0 => false,
            n => {
                return Err(Error::ShapeMismatch(format!(
                    "{n} readout maps for {k} layers"
                )))
            }
        };
        let mut dims = vec![self.feature_dim];
        let mut layers = Vec::with_capacity(k);
        for (i, layer) in self.layers.iter().enumerate() {
            let w = to_matrix(&layer.w, "layer weight")?;
            let input = *dims.last().unwrap();
            if w.ncols() != input || layer.b.len() != w.nrows() {
                return Err(Error::ShapeMismatch(format!(
                    "layer {i}: W is {}x{}, b has {}, expected input dim {input}",
                    w.nrows(),
                    w.ncols(),
                    layer.b.len()
                )));
            }
            dims.push(w.nrows());
            layers.push((w, DVector::from_vec(layer.b.clone()), layer.epsilon));
        }
        let read_dims = if reads_input { &dims[..] } else { &dims[1..] };
        let mut readout = Vec::with_capacity(self.readout.len());
        for (i, (r, &dim)) in self.readout.iter().zip(read_dims).enumerate() {
            let w = to_matrix(&r.w, "readout weight")?;
            if w.nrows() != self.classes || w.ncols() != dim || r.b.len() != self.classes {
                return Err(Error::ShapeMismatch(format!(
                    "readout {i}: W is {}x{}, expected {}x{dim}",
                    w.nrows(),
                    w.ncols(),
                    self.classes
                )));
            }
            readout.push((w, DVector::from_vec(r.b.clone())));
        }
        Ok(Compiled {
            layers,
            readout,
            reads_input,
            feature_dim: self.feature_dim,
        })
    }

    pub fn into_classifier(self) -> Result<GinClassifier> {
        let compiled = self.compile()?;
        Ok(GinClassifier { compiled })
    }
}

/// Returns the index of the largest value, preferring the smallest index on ties.
pub(crate) fn argmax_first(values: &[f64]) -> Label {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct GinClassifier {
    compiled: Compiled,
}

impl GinClassifier {
    /// Summed per-layer logits.
    pub fn logits(&self, graph: &Graph) -> Result<Vec<f64>> {
        let c = &self.compiled;
        let n = graph.n_nodes();
        let x = match graph.features() {
            Some(x) if x.ncols() == c.feature_dim => x.clone(),
            Some(x) => {
                return Err(Error::ShapeMismatch(format!(
                    "graph has {}-dim features, model expects {}",
                    x.ncols(),
                    c.feature_dim
                )))
            }
            None => DMatrix::from_element(n, c.feature_dim, 1.0),
        };
        let neighbors = graph.neighbors();

        let mut logits = DVector::zeros(c.readout[0].1.len());
        let mut readouts = c.readout.iter();
        let mut pool = |h: &DMatrix<f64>, logits: &mut DVector<f64>| {
            let (w, b) = readouts.next().expect("readout count validated");
            let pooled: DVector<f64> = h.row_sum().transpose();
            *logits += w * pooled + b;
        };
        if c.reads_input {
            pool(&x, &mut logits);
        }
        let mut h = x;
        for (w, b, eps) in &c.layers {
            let mut agg = h.scale(1.0 + eps);
            for (v, nbrs) in neighbors.iter().enumerate() {
                for &u in nbrs {
                    let row = h.row(u).clone_owned();
                    let mut target = agg.row_mut(v);
                    target += row;
                }
            }
            let mut next = agg * w.transpose();
            for mut row in next.row_iter_mut() {
                row += b.transpose();
                row.apply(|z| *z = z.max(0.0));
            }
            pool(&next, &mut logits);
            h = next;
        }
        Ok(logits.iter().copied().collect())
    }
}

impl Classifier for GinClassifier {
    fn classify(&self, graph: &Graph) -> Result<Label> {
        Ok(argmax_first(&self.logits(graph)?))
    }
}
