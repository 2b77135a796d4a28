//! Zero-forcing feasibility checks and DoF accounting.
//!
//! Downlink: each active message is beamformed from its transmit set so that
//! it vanishes at every other active receiver it reaches. For generic channel
//! coefficients this is possible exactly when the destination's channel row
//! is not in the generic span of the constrained rows, which is decided by
//! bipartite matching (term rank) on the sparsity pattern.
//!
//! Uplink: base stations decode one word each, after subtracting words that
//! were decoded earlier and forwarded to them through the association sets.

mod best;
mod downlink;
pub(crate) mod rank;
pub(crate) mod search;
mod uplink;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::PuDoF;
use crate::index_set::IndexSet;
use crate::model::ModelError;

pub use best::{best_plans, BestPlans, SearchCap, DEFAULT_BEST_PLANS_CAP};
pub use downlink::{check_downlink, counting_rule_holds};
pub use uplink::{check_uplink, decode_depth, dependencies, find_uplink_order};

/// Downlink strategy: the set `T_m ⊆ C_m` of base stations jointly sending `W_m`,
/// for every active mobile terminal `m`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DownlinkPlan {
    transmit_sets: BTreeMap<usize, IndexSet>,
}

impl DownlinkPlan {
    pub fn new(transmit_sets: BTreeMap<usize, IndexSet>) -> Self {
        Self { transmit_sets }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, IndexSet)>) -> Self {
        Self { transmit_sets: pairs.into_iter().collect() }
    }

    pub fn active_mts(&self) -> IndexSet {
        self.transmit_sets.keys().copied().collect()
    }

    pub fn transmit_set(&self, m: usize) -> Option<&IndexSet> {
        self.transmit_sets.get(&m)
    }

    pub fn transmit_sets(&self) -> &BTreeMap<usize, IndexSet> {
        &self.transmit_sets
    }

    pub fn len(&self) -> usize {
        self.transmit_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmit_sets.is_empty()
    }

    /// Copy without mobile terminal `m`.
    pub fn without(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.transmit_sets.remove(&m);
        out
    }

    pub fn insert(&mut self, m: usize, t: IndexSet) {
        self.transmit_sets.insert(m, t);
    }
}

/// Uplink strategy: decoding pairs `(m, d_m)` and the order words are decoded in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UplinkPlan {
    pairs: Vec<(usize, usize)>,
    order: Vec<usize>,
}

impl UplinkPlan {
    /// Pairs are stored sorted by mobile terminal.
    pub fn new(mut pairs: Vec<(usize, usize)>, order: Vec<usize>) -> Self {
        pairs.sort_unstable();
        Self { pairs, order }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn decoded(&self) -> IndexSet {
        self.pairs.iter().map(|&(m, _)| m).collect()
    }

    pub fn decoder_of(&self, m: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(mm, _)| mm == m).map(|&(_, d)| d)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Plan restricted to the first `n` users of the decode order.
    pub fn order_prefix(&self, n: usize) -> Self {
        let order: Vec<usize> = self.order.iter().copied().take(n).collect();
        let pairs = self.pairs.iter().copied().filter(|(m, _)| order.contains(m)).collect();
        Self::new(pairs, order)
    }
}

/// Outcome of a successful feasibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    /// 0/1 per user, index 0 is user 1.
    pub per_user_dof: Vec<u8>,
    pub eta: usize,
    pub pudof: PuDoF,
    /// Longest decoding dependency chain (uplink only).
    pub decode_depth: Option<usize>,
}

impl Evaluation {
    pub(crate) fn from_active(k: usize, active: &IndexSet, decode_depth: Option<usize>) -> Self {
        let mut per_user_dof = vec![0u8; k];
        for m in active {
            per_user_dof[m - 1] = 1;
        }
        let eta = active.len();
        Self { per_user_dof, eta, pudof: PuDoF::new(eta as u64, k as u64).expect("eta <= K"), decode_depth }
    }
}

/// Why a downlink message cannot be delivered interference-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DownlinkFailure {
    /// None of the transmitting base stations reaches the destination.
    NotDelivered,
    /// The destination row lies in the span of the rows that must be nulled.
    NullingDeficit { constraints: usize, transmit_size: usize, constraint_rank: usize },
}

/// Why an uplink pair cannot be decoded interference-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UplinkFailure {
    /// `interferer` reaches `bs` but is decoded later (or in a cycle).
    Ordering,
    /// `interferer` reaches `bs` but its word is never forwarded there.
    MissingAssociation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Association(#[from] ModelError),
    #[error("malformed plan: {0}")]
    Malformed(String),
    #[error("downlink message W_{mt} infeasible: {}", describe_downlink(.failure))]
    Downlink { mt: usize, failure: DownlinkFailure },
    #[error("uplink pair ({mt}, {bs}) blocked by W_{interferer}: {}", describe_uplink(.failure))]
    Uplink { mt: usize, bs: usize, interferer: usize, failure: UplinkFailure },
    #[error("search refused: K={k} exceeds the exact-search cap {cap}; evaluate a scheme instead")]
    CapExceeded { k: usize, cap: usize },
}

fn describe_downlink(f: &DownlinkFailure) -> String {
    match f {
        DownlinkFailure::NotDelivered => "transmit set does not reach the destination".into(),
        DownlinkFailure::NullingDeficit { constraints, transmit_size, constraint_rank } => format!(
            "{constraints} active receivers to null (rank {constraint_rank}) leave no signal at the destination with {transmit_size} transmitters"
        ),
    }
}

fn describe_uplink(f: &UplinkFailure) -> &'static str {
    match f {
        UplinkFailure::Ordering => "interferer is not decoded earlier",
        UplinkFailure::MissingAssociation => "decoding base station is not associated with the interferer",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_counts_active_users() {
        let e = Evaluation::from_active(4, &IndexSet::from([1, 4]), None);
        assert_eq!(e.per_user_dof, vec![1, 0, 0, 1]);
        assert_eq!(e.eta, 2);
        assert_eq!(e.pudof, PuDoF::new(1, 2).unwrap());
    }

    #[test]
    fn order_prefix_keeps_pairs_in_prefix() {
        let p = UplinkPlan::new(vec![(1, 1), (2, 2), (3, 3)], vec![3, 2, 1]);
        let pre = p.order_prefix(2);
        assert_eq!(pre.pairs(), &[(2, 2), (3, 3)]);
        assert_eq!(pre.order(), &[3, 2]);
    }
}
