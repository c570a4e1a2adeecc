//! Hard-label access to a graph classifier.
//!
//! A [`Classifier`] is the raw model. Attacks never call it directly; they go
//! through a [`HardLabelOracle`], which counts every query in a shared
//! [`QueryLedger`] and optionally enforces a query budget.

mod gin;
mod structural;
mod table;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Label};

pub use gin::{GinClassifier, GinLayer, GinReadout, GinWeights};
pub use structural::{FnClassifier, StructuralFeature, StructuralOracle};
pub use table::{GraphKey, TableOracle};

/// A deterministic graph classifier that exposes only its predicted label.
pub trait Classifier: Send + Sync {
    fn classify(&self, graph: &Graph) -> Result<Label>;
}

impl<C: Classifier + ?Sized> Classifier for Arc<C> {
    fn classify(&self, graph: &Graph) -> Result<Label> {
        (**self).classify(graph)
    }
}

impl<C: Classifier + ?Sized> Classifier for Box<C> {
    fn classify(&self, graph: &Graph) -> Result<Label> {
        (**self).classify(graph)
    }
}

/// Which part of an attack issued a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Cgs,
    BinarySearch,
    Qegc,
    /// Final verification, baselines, evaluation.
    Other,
}

#[derive(Debug, Default)]
pub struct QueryLedger {
    total: AtomicU64,
    cgs: AtomicU64,
    binary_search: AtomicU64,
    qegc: AtomicU64,
    other: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub total: u64,
    pub cgs: u64,
    pub binary_search: u64,
    pub qegc: u64,
    pub other: u64,
}

impl QueryCounts {
    pub fn phase_sum(&self) -> u64 {
        self.cgs + self.binary_search + self.qegc + self.other
    }

    pub fn get(&self, phase: Phase) -> u64 {
        match phase {
            Phase::Cgs => self.cgs,
            Phase::BinarySearch => self.binary_search,
            Phase::Qegc => self.qegc,
            Phase::Other => self.other,
        }
    }
}

impl std::ops::Add for QueryCounts {
    type Output = QueryCounts;

    fn add(self, rhs: Self) -> Self {
        QueryCounts {
            total: self.total + rhs.total,
            cgs: self.cgs + rhs.cgs,
            binary_search: self.binary_search + rhs.binary_search,
            qegc: self.qegc + rhs.qegc,
            other: self.other + rhs.other,
        }
    }
}

impl QueryLedger {
    fn phase_counter(&self, phase: Phase) -> &AtomicU64 {
        match phase {
            Phase::Cgs => &self.cgs,
            Phase::BinarySearch => &self.binary_search,
            Phase::Qegc => &self.qegc,
            Phase::Other => &self.other,
        }
    }

    /// Reserves one query, failing when the budget is already spent.
    fn reserve(&self, phase: Phase, budget: Option<u64>) -> Result<()> {
        let mut current = self.total.load(Ordering::Acquire);
        loop {
            if let Some(limit) = budget {
                if current >= limit {
                    return Err(Error::BudgetExhausted { limit });
                }
            }
            match self.total.compare_exchange_weak(
                current,
                current + 1,
                Ordering::AcqRel,
                Ordering::Acquire,
            ) {
                Ok(_) => break,
                Err(seen) => current = seen,
            }
        }
        self.phase_counter(phase).fetch_add(1, Ordering::AcqRel);
        Ok(())
    }

    pub fn snapshot(&self) -> QueryCounts {
        QueryCounts {
            total: self.total.load(Ordering::Acquire),
            cgs: self.cgs.load(Ordering::Acquire),
            binary_search: self.binary_search.load(Ordering::Acquire),
            qegc: self.qegc.load(Ordering::Acquire),
            other: self.other.load(Ordering::Acquire),
        }
    }
}

/// Query-counted hard-label access to a classifier.
///
/// Clones share the same model and ledger. Use [`HardLabelOracle::fresh`] to
/// get an independent ledger for a new attack run.
#[derive(Clone)]
pub struct HardLabelOracle {
    model: Arc<dyn Classifier>,
    ledger: Arc<QueryLedger>,
    budget: Option<u64>,
}

impl fmt::Debug for HardLabelOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HardLabelOracle")
            .field("ledger", &self.ledger.snapshot())
            .field("budget", &self.budget)
            .finish()
    }
}

impl HardLabelOracle {
    pub fn new<C: Classifier + 'static>(model: C) -> Self {
        Self::from_arc(Arc::new(model))
    }

    pub fn from_arc(model: Arc<dyn Classifier>) -> Self {
        Self {
            model,
            ledger: Arc::new(QueryLedger::default()),
            budget: None,
        }
    }

    /// Caps the number of queries; the query after the `max_queries`-th fails
    /// with [`Error::BudgetExhausted`].
    pub fn with_budget(mut self, max_queries: u64) -> Result<Self> {
        if max_queries == 0 {
            return Err(Error::InvalidParams("query budget must be positive".into()));
        }
        self.budget = Some(max_queries);
        Ok(self)
    }

    /// Same model and budget, new zeroed ledger.
    pub fn fresh(&self) -> Self {
        Self {
            model: Arc::clone(&self.model),
            ledger: Arc::new(QueryLedger::default()),
            budget: self.budget,
        }
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn model(&self) -> &Arc<dyn Classifier> {
        &self.model
    }

    pub fn classify(&self, graph: &Graph, phase: Phase) -> Result<Label> {
        self.ledger.reserve(phase, self.budget)?;
        self.model.classify(graph)
    }

    pub fn queries(&self) -> QueryCounts {
        self.ledger.snapshot()
    }

    pub fn total_queries(&self) -> u64 {
        self.ledger.total.load(Ordering::Acquire)
    }
}

/// Classifier wrapper that counts raw model invocations, independent of any
/// ledger. Used to audit that attacks report every query they make.
#[derive(Debug, Default)]
pub struct CallCounter<C> {
    inner: C,
    calls: AtomicU64,
}

impl<C> CallCounter<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Acquire)
    }
}

impl<C: Classifier> Classifier for CallCounter<C> {
    fn classify(&self, graph: &Graph) -> Result<Label> {
        self.calls.fetch_add(1, Ordering::AcqRel);
        self.inner.classify(graph)
    }
}
