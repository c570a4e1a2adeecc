//! Graph-classification datasets in the TUDataset text format.
//!
//! A dataset `NAME` in directory `dir` consists of
//!
//! - `NAME_A.txt`: one `i, j` edge per line over 1-indexed global node ids,
//! - `NAME_graph_indicator.txt`: line `v` holds the 1-indexed graph of node `v`,
//! - `NAME_graph_labels.txt`: line `g` holds the class of graph `g`,
//! - `NAME_node_labels.txt` (optional): line `v` holds the label of node `v`,
//!   one-hot encoded into node features on load.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub name: String,
    pub graphs: Vec<Graph>,
    pub n_classes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub graphs: usize,
    pub avg_nodes: f64,
    pub avg_edges: f64,
}

impl DatasetBundle {
    pub fn stats(&self) -> DatasetStats {
        let count = self.graphs.len();
        let denom = count.max(1) as f64;
        DatasetStats {
            graphs: count,
            avg_nodes: self.graphs.iter().map(|g| g.n_nodes() as f64).sum::<f64>() / denom,
            avg_edges: self
                .graphs
                .iter()
                .map(|g| g.edge_count() as f64)
                .sum::<f64>()
                / denom,
        }
    }
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        file: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_int<T: std::str::FromStr>(path: &Path, line: usize, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("expected an integer, found {field:?}")))
}

pub fn load_tudataset(dir: impl AsRef<Path>, name: &str) -> Result<DatasetBundle> {
    let dir = dir.as_ref();
    let file = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));

    let labels_path = file("graph_labels");
    let raw_labels: Vec<i64> = read_lines(&labels_path)?
        .into_iter()
        .map(|(ln, s)| parse_int(&labels_path, ln, &s))
        .collect::<Result<_>>()?;
    let n_graphs = raw_labels.len();
    let classes: Vec<i64> = raw_labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let indicator_path = file("graph_indicator");
    let mut node_graph = Vec::new();
    let mut local = Vec::new();
    let mut sizes = vec![0usize; n_graphs];
    for (v, (ln, s)) in read_lines(&indicator_path)?.into_iter().enumerate() {
        let gid: usize = parse_int(&indicator_path, ln, &s)?;
        if gid == 0 || gid > n_graphs {
            return Err(Error::DanglingNode {
                node: v + 1,
                graph: gid,
            });
        }
        node_graph.push(gid - 1);
        local.push(sizes[gid - 1]);
        sizes[gid - 1] += 1;
    }
    let n_nodes = node_graph.len();

    let mut graphs: Vec<Graph> = sizes.iter().map(|&n| Graph::empty(n)).collect();
    let a_path = file("A");
    for (ln, s) in read_lines(&a_path)? {
        let mut parts = s.split(',');
        let (Some(x), Some(y), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(
                &a_path,
                ln,
                format!("expected \"i, j\", found {s:?}"),
            ));
        };
        let i: usize = parse_int(&a_path, ln, x)?;
        let j: usize = parse_int(&a_path, ln, y)?;
        if i == 0 || j == 0 || i > n_nodes || j > n_nodes {
            return Err(parse_err(
                &a_path,
                ln,
                format!("node id out of range 1..={n_nodes}"),
            ));
        }
        if i == j {
            return Err(parse_err(&a_path, ln, "self-loop"));
        }
        let (gi, gj) = (node_graph[i - 1], node_graph[j - 1]);
        if gi != gj {
            return Err(parse_err(&a_path, ln, "edge joins two different graphs"));
        }
        graphs[gi].set_edge(local[i - 1], local[j - 1], true);
    }

    let node_labels_path = file("node_labels");
    if node_labels_path.exists() {
        let raw: Vec<i64> = read_lines(&node_labels_path)?
            .into_iter()
            .map(|(ln, s)| parse_int(&node_labels_path, ln, s.split(',').next().unwrap_or("")))
            .collect::<Result<_>>()?;
        if raw.len() != n_nodes {
            return Err(parse_err(
                &node_labels_path,
                raw.len(),
                format!("{} node labels for {n_nodes} nodes", raw.len()),
            ));
        }
        let cats: Vec<i64> = raw
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut feats: Vec<DMatrix<f64>> = sizes
            .iter()
            .map(|&n| DMatrix::zeros(n, cats.len()))
            .collect();
        for (v, lab) in raw.iter().enumerate() {
            let c = cats.binary_search(lab).expect("category collected above");
            feats[node_graph[v]][(local[v], c)] = 1.0;
        }
        graphs = graphs
            .into_iter()
            .zip(feats)
            .map(|(g, x)| g.with_features(x))
            .collect::<Result<_>>()?;
    }

    let graphs = graphs
        .into_iter()
        .zip(&raw_labels)
        .map(|(g, l)| g.with_label(classes.binary_search(l).expect("label collected above")))
        .collect();
    Ok(DatasetBundle {
        name: name.to_string(),
        graphs,
        n_classes: classes.len(),
    })
}

/// Writes `bundle` in the same format. Node features, when present, must be
/// one-hot; they are written as node labels.
pub fn write_tudataset(bundle: &DatasetBundle, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let open = |suffix: &str| -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(
            dir.join(format!("{}_{suffix}.txt", bundle.name)),
        )?))
    };
    let mut a = open("A")?;
    let mut indicator = open("graph_indicator")?;
    let mut labels = open("graph_labels")?;
    let with_features = bundle.graphs.iter().any(|g| g.features().is_some());
    let mut node_labels = if with_features {
        Some(open("node_labels")?)
    } else {
        None
    };

    let mut offset = 0;
    for (gid, g) in bundle.graphs.iter().enumerate() {
        let label = g
            .label()
            .ok_or_else(|| Error::InvalidParams(format!("graph {gid} has no label")))?;
        writeln!(labels, "{label}")?;
        for _ in 0..g.n_nodes() {
            writeln!(indicator, "{}", gid + 1)?;
        }
        let mut pairs: Vec<(usize, usize)> = g
            .edges()
            .into_iter()
            .flat_map(|(i, j)| [(i, j), (j, i)])
            .collect();
        pairs.sort_unstable();
        for (i, j) in pairs {
            writeln!(a, "{}, {}", offset + i + 1, offset + j + 1)?;
        }
        if let Some(out) = node_labels.as_mut() {
            let x = g
                .features()
                .ok_or_else(|| Error::InvalidParams(format!("graph {gid} lacks node features")))?;
            for row in x.row_iter() {
                let hot: Vec<usize> = (0..row.len()).filter(|&c| row[c] != 0.0).collect();
                if hot.len() != 1 || row[hot[0]] != 1.0 {
                    return Err(Error::InvalidParams(format!(
                        "graph {gid} has non one-hot node features"
                    )));
                }
                writeln!(out, "{}", hot[0])?;
            }
        }
        offset += g.n_nodes();
    }
    a.flush()?;
    indicator.flush()?;
    labels.flush()?;
    if let Some(mut out) = node_labels {
        out.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, suffix: &str, body: &str) {
        std::fs::write(dir.join(format!("{name}_{suffix}.txt")), body).unwrap();
    }

    fn fixture(dir: &Path) {
        write(dir, "TOY", "A", "1, 2\n2, 3\n3, 1\n2, 1\n4, 5\n5, 6\n");
        write(dir, "TOY", "graph_indicator", "1\n1\n1\n2\n2\n2\n");
        write(dir, "TOY", "graph_labels", "-1\n1\n");
    }

    #[test]
    fn loads_triangle_and_path() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        let b = load_tudataset(tmp.path(), "TOY").unwrap();
        assert_eq!(b.graphs.len(), 2);
        assert_eq!(b.n_classes, 2);
        assert_eq!((b.graphs[0].n_nodes(), b.graphs[0].edge_count()), (3, 3));
        assert_eq!((b.graphs[1].n_nodes(), b.graphs[1].edge_count()), (3, 2));
        assert_eq!(b.graphs[0].label(), Some(0));
        assert_eq!(b.graphs[1].label(), Some(1));
        let s = b.stats();
        assert_eq!(s.avg_edges, 2.5);
    }

    #[test]
    fn self_loop_is_a_parse_error() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        write(tmp.path(), "TOY", "A", "1, 2\n2, 2\n");
        match load_tudataset(tmp.path(), "TOY") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dangling_graph_id() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        write(tmp.path(), "TOY", "graph_indicator", "1\n1\n1\n2\n2\n3\n");
        assert!(matches!(
            load_tudataset(tmp.path(), "TOY"),
            Err(Error::DanglingNode { node: 6, graph: 3 })
        ));
    }

    #[test]
    fn node_labels_become_one_hot() {
        let tmp = tempfile::tempdir().unwrap();
        fixture(tmp.path());
        write(tmp.path(), "TOY", "node_labels", "3\n7\n3\n7\n7\n3\n");
        let b = load_tudataset(tmp.path(), "TOY").unwrap();
        let x = b.graphs[0].features().unwrap();
        assert_eq!(x.ncols(), 2);
        assert_eq!(x.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0]);

        let out = tempfile::tempdir().unwrap();
        write_tudataset(&b, out.path()).unwrap();
        assert_eq!(load_tudataset(out.path(), "TOY").unwrap(), b);
    }
}
