//! Network topology and the cell-association data model.
//!
//! Users are numbered `1..=K`. Mobile terminal `i` hears base stations
//! `i-L ..= i` (truncated at the start of the network), so base station `j`
//! reaches mobile terminals `j ..= j+L`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index_set::IndexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid network config: {0}")]
    InvalidConfig(String),
    #[error("index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("association has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("association budget exceeded: {}", fmt_violations(.0))]
    BudgetViolation(Vec<BudgetViolation>),
    #[error("user {user} is associated with base station {bs}, outside 1..={k}")]
    MemberOutOfRange { user: usize, bs: usize, k: usize },
}

fn fmt_violations(v: &[BudgetViolation]) -> String {
    v.iter().map(|b| format!("|C_{}| = {} > {}", b.user, b.size, b.budget)).collect::<Vec<_>>().join(", ")
}

/// One user whose association set is larger than the budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetViolation {
    pub user: usize,
    pub size: usize,
    pub budget: usize,
}

/// Topology and backhaul budget: `K` users, connectivity `L`, association budget `Nc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NetworkConfig {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "Nc")]
    nc: usize,
}

impl NetworkConfig {
    pub fn new(k: usize, l: usize, nc: usize) -> Result<Self, ModelError> {
        if k == 0 || l == 0 || nc == 0 {
            return Err(ModelError::InvalidConfig(format!("K={k}, L={l}, Nc={nc}: all parameters must be at least 1")));
        }
        Ok(Self { k, l, nc })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn nc(&self) -> usize {
        self.nc
    }

    /// Same topology with a different user count.
    pub fn with_k(&self, k: usize) -> Result<Self, ModelError> {
        Self::new(k, self.l, self.nc)
    }

    pub fn check_index(&self, i: usize) -> Result<(), ModelError> {
        if (1..=self.k).contains(&i) {
            Ok(())
        } else {
            Err(ModelError::IndexOutOfRange { index: i, k: self.k })
        }
    }

    /// Whether mobile terminal `mt` hears base station `bs`.
    pub fn connected(&self, mt: usize, bs: usize) -> bool {
        bs <= mt && mt <= bs + self.l
    }

    /// First base station heard by `mt` (no range check).
    pub(crate) fn first_bs(&self, mt: usize) -> usize {
        mt.saturating_sub(self.l).max(1)
    }

    /// Last mobile terminal reached by `bs` (no range check).
    pub(crate) fn last_mt(&self, bs: usize) -> usize {
        (bs + self.l).min(self.k)
    }

    /// Base stations heard by mobile terminal `i`: `{i-L, ..., i} ∩ [1, K]`.
    pub fn mt_neighbors(&self, i: usize) -> Result<IndexSet, ModelError> {
        self.check_index(i)?;
        Ok(IndexSet::range(self.first_bs(i), i))
    }

    /// Mobile terminals reached by base station `j`: `{j, ..., j+L} ∩ [1, K]`.
    pub fn bs_neighbors(&self, j: usize) -> Result<IndexSet, ModelError> {
        self.check_index(j)?;
        Ok(IndexSet::range(j, self.last_mt(j)))
    }

    /// Union of `bs_neighbors` over a set of base stations.
    pub fn coverage(&self, bss: &IndexSet) -> Result<IndexSet, ModelError> {
        let mut out = IndexSet::new();
        for j in bss {
            self.check_index(j)?;
            for i in j..=self.last_mt(j) {
                out.insert(i);
            }
        }
        Ok(out)
    }

    pub fn validate_association(&self, assoc: &CellAssociation) -> Result<(), ModelError> {
        assoc.validate(self)
    }
}

impl fmt::Display for NetworkConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K={} L={} Nc={}", self.k, self.l, self.nc)
    }
}

/// Per-user base-station sets `C_1 .. C_K`, shared by both sessions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellAssociation {
    sets: Vec<IndexSet>,
}

impl CellAssociation {
    pub fn new(sets: Vec<IndexSet>) -> Self {
        Self { sets }
    }

    /// `k` empty sets.
    pub fn empty(k: usize) -> Self {
        Self { sets: vec![IndexSet::new(); k] }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `C_i` for 1-based user `i`. Panics when out of range.
    pub fn get(&self, i: usize) -> &IndexSet {
        &self.sets[i - 1]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut IndexSet {
        &mut self.sets[i - 1]
    }

    pub fn set(&mut self, i: usize, c: IndexSet) {
        self.sets[i - 1] = c;
    }

    pub fn sets(&self) -> &[IndexSet] {
        &self.sets
    }

    /// `(user, C_user)` pairs in user order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &IndexSet)> {
        self.sets.iter().enumerate().map(|(n, c)| (n + 1, c))
    }

    pub fn validate(&self, cfg: &NetworkConfig) -> Result<(), ModelError> {
        if self.sets.len() != cfg.k() {
            return Err(ModelError::WrongLength { got: self.sets.len(), expected: cfg.k() });
        }
        for (i, c) in self.iter() {
            if let Some(bs) = c.iter().find(|&j| j == 0 || j > cfg.k()) {
                return Err(ModelError::MemberOutOfRange { user: i, bs, k: cfg.k() });
            }
        }
        let violations: Vec<_> = self
            .iter()
            .filter(|(_, c)| c.len() > cfg.nc())
            .map(|(user, c)| BudgetViolation { user, size: c.len(), budget: cfg.nc() })
            .collect();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ModelError::BudgetViolation(violations))
        }
    }
}

impl From<Vec<IndexSet>> for CellAssociation {
    fn from(sets: Vec<IndexSet>) -> Self {
        Self::new(sets)
    }
}

/// Which session(s) a computation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Down,
    Up,
    Joint,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Down, Mode::Up, Mode::Joint];

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Down => "down",
            Mode::Up => "up",
            Mode::Joint => "joint",
        }
    }

    pub fn has_downlink(&self) -> bool {
        matches!(self, Mode::Down | Mode::Joint)
    }

    pub fn has_uplink(&self) -> bool {
        matches!(self, Mode::Up | Mode::Joint)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "down" => Ok(Mode::Down),
            "up" => Ok(Mode::Up),
            "joint" => Ok(Mode::Joint),
            other => Err(format!("unknown mode {other:?} (expected down, up or joint)")),
        }
    }
}
