use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Classifier;
use crate::error::{Error, Result};
use crate::graph::{Graph, Label};

/// Graph statistics with analytically known decision boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructuralFeature {
    EdgeCount,
    TriangleCount,
    MaxDegree,
}

impl StructuralFeature {
    pub fn measure(&self, g: &Graph) -> usize {
        match self {
            StructuralFeature::EdgeCount => g.edge_count(),
            StructuralFeature::TriangleCount => triangle_count(g),
            StructuralFeature::MaxDegree => g.degrees().into_iter().max().unwrap_or(0),
        }
    }
}

impl FromStr for StructuralFeature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge_count" | "edges" => Ok(Self::EdgeCount),
            "triangle_count" | "triangles" => Ok(Self::TriangleCount),
            "max_degree" => Ok(Self::MaxDegree),
            other => Err(Error::InvalidParams(format!(
                "unknown structural feature {other:?}"
            ))),
        }
    }
}

impl fmt::Display for StructuralFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EdgeCount => "edge_count",
            Self::TriangleCount => "triangle_count",
            Self::MaxDegree => "max_degree",
        })
    }
}

fn triangle_count(g: &Graph) -> usize {
    let n = g.n_nodes();
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                continue;
            }
            for k in j + 1..n {
                if g.has_edge(i, k) && g.has_edge(j, k) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Labels a graph 1 iff `feature(graph) >= threshold`, else 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralOracle {
    pub feature: StructuralFeature,
    pub threshold: usize,
}

impl StructuralOracle {
    pub fn new(feature: StructuralFeature, threshold: usize) -> Self {
        Self { feature, threshold }
    }
}

impl Classifier for StructuralOracle {
    fn classify(&self, graph: &Graph) -> Result<Label> {
        Ok(usize::from(self.feature.measure(graph) >= self.threshold))
    }
}

/// Adapts a closure into a [`Classifier`].
pub struct FnClassifier<F>(F);

impl<F> FnClassifier<F>
where
    F: Fn(&Graph) -> Label + Send + Sync,
{
    pub fn new(f: F) -> Self {
        Self(f)
    }
}

impl<F> Classifier for FnClassifier<F>
where
    F: Fn(&Graph) -> Label + Send + Sync,
{
    fn classify(&self, graph: &Graph) -> Result<Label> {
        Ok((self.0)(graph))
    }
}
