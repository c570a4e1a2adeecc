use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::DatasetBundle;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::Classifier;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SyntheticKind {
    ErdosRenyi {
        n: usize,
        p: f64,
    },
    /// Two `K_k` cliques joined by one edge.
    Barbell {
        k: usize,
    },
    Sbm {
        sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
    },
}

impl SyntheticKind {
    fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        let ok = match self {
            SyntheticKind::ErdosRenyi { n, p } => *n >= 1 && prob(*p),
            SyntheticKind::Barbell { k } => *k >= 1,
            SyntheticKind::Sbm { sizes, p_in, p_out } => {
                !sizes.is_empty() && sizes.iter().all(|&s| s > 0) && prob(*p_in) && prob(*p_out)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "invalid synthetic parameters {self}"
            )))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        match self {
            SyntheticKind::ErdosRenyi { n, p } => {
                let mut g = Graph::empty(*n);
                for i in 0..*n {
                    for j in i + 1..*n {
                        if rng.random_bool(*p) {
                            g.set_edge(i, j, true);
                        }
                    }
                }
                g
            }
            SyntheticKind::Barbell { k } => {
                let mut g = Graph::empty(2 * k);
                for base in [0, *k] {
                    for i in 0..*k {
                        for j in i + 1..*k {
                            g.set_edge(base + i, base + j, true);
                        }
                    }
                }
                g.set_edge(k - 1, *k, true);
                g
            }
            SyntheticKind::Sbm { sizes, p_in, p_out } => {
                let block: Vec<usize> = sizes
                    .iter()
                    .enumerate()
                    .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
                    .collect();
                let n = block.len();
                let mut g = Graph::empty(n);
                for i in 0..n {
                    for j in i + 1..n {
                        let p = if block[i] == block[j] { *p_in } else { *p_out };
                        if rng.random_bool(p) {
                            g.set_edge(i, j, true);
                        }
                    }
                }
                g
            }
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntheticKind::ErdosRenyi { n, p } => write!(f, "er:{n}:{p}"),
            SyntheticKind::Barbell { k } => write!(f, "barbell:{k}"),
            SyntheticKind::Sbm { sizes, p_in, p_out } => {
                let s: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
                write!(f, "sbm:{}:{p_in}:{p_out}", s.join(","))
            }
        }
    }
}

/// Parses `er:N:P`, `barbell:K` or `sbm:S1,S2,...:P_IN:P_OUT`.
impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("cannot parse synthetic spec {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
        let int = |x: &str| x.parse::<usize>().map_err(|_| bad());
        let kind = match parts.as_slice() {
            ["er", n, p] => SyntheticKind::ErdosRenyi {
                n: int(n)?,
                p: num(p)?,
            },
            ["barbell", k] => SyntheticKind::Barbell { k: int(k)? },
            ["sbm", sizes, p_in, p_out] => SyntheticKind::Sbm {
                sizes: sizes.split(',').map(int).collect::<Result<_>>()?,
                p_in: num(p_in)?,
                p_out: num(p_out)?,
            },
            _ => return Err(bad()),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// `count` graphs drawn with a seeded generator and labelled by `labeler`.
pub fn generate_synthetic(
    kind: &SyntheticKind,
    count: usize,
    seed: u64,
    labeler: &dyn Classifier,
) -> Result<DatasetBundle> {
    kind.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs = Vec::with_capacity(count);
    let mut max_label = 0;
    for _ in 0..count {
        let g = kind.sample(&mut rng);
        let label = labeler.classify(&g)?;
        max_label = max_label.max(label);
        graphs.push(g.with_label(label));
    }
    Ok(DatasetBundle {
        name: kind.to_string(),
        graphs,
        n_classes: if count == 0 { 0 } else { max_label + 1 },
    })
}
