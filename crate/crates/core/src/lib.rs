//! Hard-label black-box structural attacks against graph classifiers.
//!
//! The attack pipeline is:
//!
//! 1. [`partition::louvain`] splits the target graph into clusters.
//! 2. [`cgs::coarse_grained_search`] samples random flips inside supernodes,
//!    superlinks and finally the whole graph until the label changes.
//! 3. [`attack::sign_sgd_attack`] refines that starting direction with
//!    sign-SGD, estimating gradient signs with one query per direction.
//!
//! [`defense`] provides the low-rank adjacency filter and [`harness`] the
//! dataset loaders, baselines, metrics and experiment runner.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod cgs;
pub mod defense;
pub mod error;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod partition;

pub use error::{Error, Result};
pub use graph::{Graph, Label, PerturbationVector};
pub use oracle::{Classifier, HardLabelOracle, Phase, QueryCounts};
