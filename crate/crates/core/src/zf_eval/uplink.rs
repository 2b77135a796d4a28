use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::index_set::IndexSet;
use crate::model::{CellAssociation, NetworkConfig};

use super::{CheckError, Evaluation, UplinkFailure, UplinkPlan};

/// Check a decoding plan: each pair's base station must see no interference
/// from decoded words other than its own, except words decoded earlier and
/// forwarded to it. Every decoded user gets one DoF; undecoded users are silent.
pub fn check_uplink(cfg: &NetworkConfig, assoc: &CellAssociation, plan: &UplinkPlan) -> Result<Evaluation, CheckError> {
    assoc.validate(cfg)?;
    let decoder = well_formed(cfg, assoc, plan)?;
    let position: HashMap<usize, usize> = plan.order().iter().enumerate().map(|(p, &m)| (m, p)).collect();

    for &m in plan.order() {
        let d = decoder[&m];
        for other in d..=cfg.last_mt(d) {
            if other == m || !decoder.contains_key(&other) {
                continue;
            }
            let failure = if position[&other] > position[&m] {
                Some(UplinkFailure::Ordering)
            } else if !assoc.get(other).contains(d) {
                Some(UplinkFailure::MissingAssociation)
            } else {
                None
            };
            if let Some(failure) = failure {
                return Err(CheckError::Uplink { mt: m, bs: d, interferer: other, failure });
            }
        }
    }

    let depth = longest_chain(cfg, plan.pairs(), plan.order());
    Ok(Evaluation::from_active(cfg.k(), &plan.decoded(), Some(depth)))
}

fn well_formed(
    cfg: &NetworkConfig,
    assoc: &CellAssociation,
    plan: &UplinkPlan,
) -> Result<HashMap<usize, usize>, CheckError> {
    let mut decoder = HashMap::new();
    let mut used_bs = BTreeSet::new();
    for &(m, d) in plan.pairs() {
        if m == 0 || m > cfg.k() || d == 0 || d > cfg.k() {
            return Err(CheckError::Malformed(format!("pair ({m}, {d}) outside 1..={}", cfg.k())));
        }
        if !cfg.connected(m, d) {
            return Err(CheckError::Malformed(format!("base station {d} does not hear mobile terminal {m}")));
        }
        if !assoc.get(m).contains(d) {
            return Err(CheckError::Malformed(format!("decoding base station {d} is not in C_{m}")));
        }
        if decoder.insert(m, d).is_some() {
            return Err(CheckError::Malformed(format!("W_{m} is decoded twice")));
        }
        if !used_bs.insert(d) {
            return Err(CheckError::Malformed(format!("base station {d} decodes more than one word")));
        }
    }
    let ordered: BTreeSet<usize> = plan.order().iter().copied().collect();
    let decoded: BTreeSet<usize> = decoder.keys().copied().collect();
    if ordered.len() != plan.order().len() || ordered != decoded {
        return Err(CheckError::Malformed("decode order is not a permutation of the decoded users".into()));
    }
    Ok(decoder)
}

/// Dependency edges `(m, m')`: decoding `W_m` at `d_m` requires `W_{m'}` first,
/// because `m'` reaches `d_m`.
pub fn dependencies(cfg: &NetworkConfig, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let decoded: IndexSet = pairs.iter().map(|&(m, _)| m).collect();
    let mut edges = Vec::new();
    for &(m, d) in pairs {
        for other in d..=cfg.last_mt(d) {
            if other != m && decoded.contains(other) {
                edges.push((m, other));
            }
        }
    }
    edges
}

/// Topological decode order, picking the highest-indexed ready user first.
/// `None` if the dependencies are cyclic or the resulting plan is rejected
/// by [`check_uplink`] (for instance because a needed association is missing).
pub fn find_uplink_order(cfg: &NetworkConfig, assoc: &CellAssociation, pairs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let order = topological_order(cfg, pairs)?;
    let plan = UplinkPlan::new(pairs.to_vec(), order);
    check_uplink(cfg, assoc, &plan).ok()?;
    Some(plan.order().to_vec())
}

fn topological_order(cfg: &NetworkConfig, pairs: &[(usize, usize)]) -> Option<Vec<usize>> {
    let mut waiting: HashMap<usize, usize> = pairs.iter().map(|&(m, _)| (m, 0)).collect();
    let mut unlocks: HashMap<usize, Vec<usize>> = HashMap::new();
    for (m, prerequisite) in dependencies(cfg, pairs) {
        *waiting.get_mut(&m)? += 1;
        unlocks.entry(prerequisite).or_default().push(m);
    }
    let mut ready: BinaryHeap<usize> = waiting.iter().filter(|(_, &n)| n == 0).map(|(&m, _)| m).collect();
    let mut order = Vec::with_capacity(pairs.len());
    while let Some(m) = ready.pop() {
        order.push(m);
        for &next in unlocks.get(&m).map(Vec::as_slice).unwrap_or(&[]) {
            let n = waiting.get_mut(&next)?;
            *n -= 1;
            if *n == 0 {
                ready.push(next);
            }
        }
    }
    (order.len() == waiting.len()).then_some(order)
}

/// Number of users on the longest dependency chain; `None` when cyclic.
pub fn decode_depth(cfg: &NetworkConfig, pairs: &[(usize, usize)]) -> Option<usize> {
    let order = topological_order(cfg, pairs)?;
    Some(longest_chain(cfg, pairs, &order))
}

/// `order` must be a topological order of the dependencies.
fn longest_chain(cfg: &NetworkConfig, pairs: &[(usize, usize)], order: &[usize]) -> usize {
    let mut prerequisites: HashMap<usize, Vec<usize>> = HashMap::new();
    for (m, p) in dependencies(cfg, pairs) {
        prerequisites.entry(m).or_default().push(p);
    }
    let mut depth: HashMap<usize, usize> = HashMap::new();
    for &m in order {
        let d = prerequisites
            .get(&m)
            .map(|ps| ps.iter().map(|p| depth.get(p).copied().unwrap_or(0)).max().unwrap_or(0))
            .unwrap_or(0)
            + 1;
        depth.insert(m, d);
    }
    depth.values().copied().max().unwrap_or(0)
}
