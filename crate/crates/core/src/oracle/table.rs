use std::collections::HashMap;

use super::Classifier;
use crate::error::{Error, Result};
use crate::graph::{slot_count, Graph, Label};

/// Canonical encoding of a graph's topology: node count plus slot bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphKey {
    n: usize,
    bits: Vec<bool>,
}

impl From<&Graph> for GraphKey {
    fn from(g: &Graph) -> Self {
        Self {
            n: g.n_nodes(),
            bits: g.slots().to_vec(),
        }
    }
}

/// Pure lookup oracle over an explicit table of graphs.
#[derive(Debug, Clone, Default)]
pub struct TableOracle {
    labels: HashMap<GraphKey, Label>,
}

impl TableOracle {
    pub fn new(labels: HashMap<GraphKey, Label>) -> Self {
        Self { labels }
    }

    /// Tabulates `f` over all `2^S` graphs on `n` nodes. Only sensible for
    /// tiny `n` (`S <= 20`).
    pub fn exhaustive(n: usize, f: impl Fn(&Graph) -> Label) -> Result<Self> {
        let s = slot_count(n);
        if s > 20 {
            return Err(Error::InvalidParams(format!(
                "exhaustive table over {s} slots is too large"
            )));
        }
        let mut labels = HashMap::with_capacity(1 << s);
        for mask in 0u32..(1u32 << s) {
            let bits = (0..s).map(|k| mask >> k & 1 == 1).collect();
            let g = Graph::from_slots(n, bits)?;
            labels.insert(GraphKey::from(&g), f(&g));
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl Classifier for TableOracle {
    fn classify(&self, graph: &Graph) -> Result<Label> {
        self.labels
            .get(&GraphKey::from(graph))
            .copied()
            .ok_or(Error::UnknownGraph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookups() {
        let t = TableOracle::exhaustive(3, |g| usize::from(g.edge_count() >= 2)).unwrap();
        assert_eq!(t.len(), 8);
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(t.classify(&path).unwrap(), 1);
        assert_eq!(t.classify(&Graph::empty(3)).unwrap(), 0);
        assert!(matches!(
            t.classify(&Graph::empty(4)),
            Err(Error::UnknownGraph)
        ));
    }
}
