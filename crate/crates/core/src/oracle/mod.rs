//! Exhaustive optimum over associations and plans for small networks.
//!
//! Plans are enumerated first and the smallest association each plan needs
//! is derived from it, instead of enumerating associations directly. An
//! uplink pair set needs `C_m = D ∩ N(m)` for every decoded `m`, where `D`
//! is the set of decoding base stations. A downlink user needs nothing beyond
//! its transmit set, and larger transmit sets only help, so it is enough to
//! try transmit sets that fill the budget.
//!
//! Downlink helpers are drawn from `[i - L - max(Nc, L+2), i + Nc]`, which
//! contains every association the block schemes produce; `widen_helpers`
//! lifts the restriction for audits.

mod lemmas;
mod report;

use std::time::{Duration, Instant};

use num_rational::Ratio;
use thiserror::Error;

use crate::closed_form::{PuDoF, Rational};
use crate::exec::Exec;
use crate::index_set::IndexSet;
use crate::model::{CellAssociation, Mode, NetworkConfig};
use crate::schemes::{build_scheme, evaluate};
use crate::zf_eval::search::{ones, AssocPolicy, DownlinkSearch, UplinkSearch, UplinkState};
use crate::zf_eval::{check_downlink, check_uplink, find_uplink_order, DownlinkPlan, UplinkPlan};

pub use lemmas::{check_uplink_lemmas, verify_witness_lemmas, window_loads, Counterexample, Property, WindowLoad};
pub use report::{formula_pudof, scheme_gap_report, GapReport};

/// Size limits for exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    pub max_k: usize,
    pub max_l: usize,
    pub max_nc: usize,
    /// Abort once this many search nodes have been expanded.
    pub max_nodes: Option<u64>,
}

impl Default for Guard {
    fn default() -> Self {
        Self { max_k: 10, max_l: 3, max_nc: 3, max_nodes: None }
    }
}

impl Guard {
    pub fn admits(&self, cfg: &NetworkConfig) -> bool {
        cfg.k() <= self.max_k && cfg.l() <= self.max_l && cfg.nc() <= self.max_nc
    }
}

#[derive(Debug, Clone, Default)]
pub struct OracleOptions {
    pub guard: Guard,
    pub exec: Exec,
    /// Let downlink transmit sets use any base station.
    pub widen_helpers: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(
        "K={k}, L={l}, Nc={nc} exceeds the search guard (K<={max_k}, L<={max_l}, Nc<={max_nc}); \
         estimated {estimate} search nodes"
    )]
    Guard { k: usize, l: usize, nc: usize, max_k: usize, max_l: usize, max_nc: usize, estimate: u64 },
    #[error("search aborted after {limit} nodes; estimated {estimate} search nodes")]
    NodeLimit { limit: u64, estimate: u64 },
}

/// Association and plans achieving the optimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub assoc: CellAssociation,
    pub downlink: Option<DownlinkPlan>,
    pub uplink: Option<UplinkPlan>,
}

/// Certified optimum. Equality ignores `elapsed`.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub config: NetworkConfig,
    pub mode: Mode,
    /// Sum DoF, or `(η_DL + η_UL)/2` for joint.
    pub eta: Rational,
    pub witness: Witness,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

impl PartialEq for OracleResult {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.mode == other.mode
            && self.eta == other.eta
            && self.witness == other.witness
            && self.nodes_explored == other.nodes_explored
    }
}

impl Eq for OracleResult {}

impl OracleResult {
    pub fn pudof(&self) -> PuDoF {
        PuDoF::from_ratio(self.eta / Ratio::from_integer(self.config.k() as u64)).expect("eta <= K")
    }
}

/// Rough size of the search tree, used in refusals. Saturates at `u64::MAX`.
pub fn estimate_nodes(cfg: &NetworkConfig, mode: Mode) -> u64 {
    let k = cfg.k() as f64;
    let uplink = ((cfg.l() + 2) as f64).powf(k);
    let window = (cfg.l() + cfg.nc().max(cfg.l() + 2) + cfg.nc() + 1) as f64;
    let per_user = binomial(window, cfg.nc() as f64);
    let downlink = 2f64.powf(k) * k * per_user;
    let estimate = match mode {
        Mode::Down => downlink,
        Mode::Up => uplink,
        Mode::Joint => uplink * downlink,
    };
    estimate as u64
}

fn binomial(n: f64, r: f64) -> f64 {
    let r = r.min(n);
    (0..r as u64).fold(1.0, |acc, i| acc * (n - i as f64) / (i as f64 + 1.0))
}

/// Exact optimum of η over all admissible associations and plans.
pub fn oracle_eta(cfg: &NetworkConfig, mode: Mode, opts: &OracleOptions) -> Result<OracleResult, OracleError> {
    let guard = opts.guard;
    if !guard.admits(cfg) {
        return Err(OracleError::Guard {
            k: cfg.k(),
            l: cfg.l(),
            nc: cfg.nc(),
            max_k: guard.max_k,
            max_l: guard.max_l,
            max_nc: guard.max_nc,
            estimate: estimate_nodes(cfg, mode),
        });
    }
    let start = Instant::now();
    let (eta, witness, nodes) = match mode {
        Mode::Down => {
            let (active, witness, nodes) = downlink_optimum(cfg, opts.widen_helpers);
            (Ratio::from_integer(active as u64), witness, nodes)
        }
        Mode::Up => uplink_optimum(cfg, opts)?,
        Mode::Joint => joint_optimum(cfg, opts)?,
    };
    debug_assert!(reverifies(cfg, &witness, mode, eta));
    Ok(OracleResult { config: *cfg, mode, eta, witness, nodes_explored: nodes, elapsed: start.elapsed() })
}

fn helper_masks(cfg: &NetworkConfig, widen: bool) -> Vec<u64> {
    let k = cfg.k() as i64;
    let (l, nc) = (cfg.l() as i64, cfg.nc() as i64);
    (1..=k)
        .map(|i| {
            let (lo, hi) = if widen { (1, k) } else { (i - l - nc.max(l + 2), i + nc) };
            IndexSet::clipped_range(lo, hi, cfg.k()).to_mask()
        })
        .collect()
}

fn scheme_floor(cfg: &NetworkConfig, mode: Mode) -> usize {
    build_scheme(cfg, mode)
        .ok()
        .and_then(|s| evaluate(cfg, &s).ok())
        .map(|e| e.downlink.iter().chain(e.uplink.iter()).map(|x| x.eta).sum())
        .unwrap_or(0)
}

fn split_depth(cfg: &NetworkConfig) -> usize {
    cfg.k().min(4)
}

fn downlink_optimum(cfg: &NetworkConfig, widen: bool) -> (usize, Witness, u64) {
    let mut search = DownlinkSearch::new(cfg, vec![0; cfg.k()], helper_masks(cfg, widen));
    let active = search.best_active(0).expect("the empty plan is always feasible");
    let mut assoc = CellAssociation::empty(cfg.k());
    let plan = DownlinkPlan::from_pairs(ones(active).map(|m| {
        let t = IndexSet::from_mask(search.canonical_transmit(m, active).expect("active user is servable"));
        assoc.set(m, t.clone());
        (m, t)
    }));
    let witness = Witness { assoc, downlink: Some(plan), uplink: None };
    (active.count_ones() as usize, witness, search.nodes)
}

fn uplink_witness(cfg: &NetworkConfig, st_pairs: Vec<(usize, usize)>, masks: &[u64]) -> (CellAssociation, UplinkPlan) {
    let assoc = CellAssociation::new(masks.iter().map(|&m| IndexSet::from_mask(m)).collect());
    let order = find_uplink_order(cfg, &assoc, &st_pairs).expect("search keeps decodable pair sets only");
    (assoc, UplinkPlan::new(st_pairs, order))
}

fn node_limit(cfg: &NetworkConfig, mode: Mode, limit: Option<u64>) -> OracleError {
    OracleError::NodeLimit { limit: limit.unwrap_or(0), estimate: estimate_nodes(cfg, mode) }
}

fn uplink_optimum(cfg: &NetworkConfig, opts: &OracleOptions) -> Result<(Rational, Witness, u64), OracleError> {
    let search = UplinkSearch {
        cfg,
        policy: AssocPolicy::Derived,
        bonus: 0,
        floor: scheme_floor(cfg, Mode::Up),
        split_depth: split_depth(cfg),
        max_nodes: opts.guard.max_nodes,
    };
    let (found, stats) =
        search.run(opts.exec, || |st: &UplinkState, _| Some((st.count(), (st.pairs(), st.derived_masks(cfg)))));
    if stats.aborted {
        return Err(node_limit(cfg, Mode::Up, opts.guard.max_nodes));
    }
    let found = found.expect("the scheme value is attainable");
    let (pairs, masks) = found.extra;
    let (assoc, plan) = uplink_witness(cfg, pairs, &masks);
    let witness = Witness { assoc, downlink: None, uplink: Some(plan) };
    Ok((Ratio::from_integer(found.score as u64), witness, stats.nodes))
}

fn joint_optimum(cfg: &NetworkConfig, opts: &OracleOptions) -> Result<(Rational, Witness, u64), OracleError> {
    let helpers = helper_masks(cfg, opts.widen_helpers);
    let (dl_alone, _, dl_nodes) = downlink_optimum(cfg, opts.widen_helpers);
    let leaf_nodes = std::sync::atomic::AtomicU64::new(0);
    let search = UplinkSearch {
        cfg,
        policy: AssocPolicy::Derived,
        bonus: dl_alone,
        floor: scheme_floor(cfg, Mode::Joint),
        split_depth: split_depth(cfg),
        max_nodes: opts.guard.max_nodes,
    };
    let (found, stats) = search.run(opts.exec, || {
        let mut dl = DownlinkSearch::new(cfg, vec![0; cfg.k()], helpers.clone());
        let leaf_nodes = &leaf_nodes;
        move |st: &UplinkState, threshold: usize| {
            let masks = st.derived_masks(cfg);
            dl.set_base(masks.clone());
            let before = dl.nodes;
            let active = dl.best_active(threshold.saturating_sub(st.count()));
            leaf_nodes.fetch_add(dl.nodes - before, std::sync::atomic::Ordering::Relaxed);
            active.map(|a| (st.count() + a.count_ones() as usize, (st.pairs(), masks, a)))
        }
    });
    if stats.aborted {
        return Err(node_limit(cfg, Mode::Joint, opts.guard.max_nodes));
    }
    let found = found.expect("the scheme value is attainable");
    let (pairs, masks, active) = found.extra;
    let dl = DownlinkSearch::new(cfg, masks.clone(), helpers);
    let mut full = masks.clone();
    let plan = DownlinkPlan::from_pairs(ones(active).map(|m| {
        let t = dl.canonical_transmit(m, active).expect("active user is servable");
        full[m - 1] |= t;
        (m, IndexSet::from_mask(t))
    }));
    let (assoc, up) = uplink_witness(cfg, pairs, &full);
    let witness = Witness { assoc, downlink: Some(plan), uplink: Some(up) };
    let nodes = dl_nodes + stats.nodes + leaf_nodes.into_inner();
    Ok((Ratio::new(found.score as u64, 2), witness, nodes))
}

fn reverifies(cfg: &NetworkConfig, w: &Witness, mode: Mode, eta: Rational) -> bool {
    let dl = w.downlink.as_ref().map(|p| check_downlink(cfg, &w.assoc, p).map(|e| e.eta));
    let ul = w.uplink.as_ref().map(|p| check_uplink(cfg, &w.assoc, p).map(|e| e.eta));
    let sessions: Result<Vec<usize>, _> = dl.into_iter().chain(ul).collect();
    let Ok(sessions) = sessions else { return false };
    let denom = if mode == Mode::Joint { 2 } else { 1 };
    Ratio::new(sessions.iter().sum::<usize>() as u64, denom) == eta
}

/// Re-run the checkers on a witness; true when they confirm the reported η.
pub fn witness_reverifies(result: &OracleResult) -> bool {
    reverifies(&result.config, &result.witness, result.mode, result.eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, l: usize, nc: usize) -> NetworkConfig {
        NetworkConfig::new(k, l, nc).unwrap()
    }

    fn eta(k: usize, l: usize, nc: usize, mode: Mode) -> Rational {
        oracle_eta(&cfg(k, l, nc), mode, &OracleOptions::default()).unwrap().eta
    }

    #[test]
    fn single_user() {
        for mode in Mode::ALL {
            assert_eq!(eta(1, 1, 1, mode), Ratio::from_integer(1));
        }
    }

    #[test]
    fn three_user_downlink() {
        assert_eq!(eta(3, 1, 1, Mode::Down), Ratio::from_integer(2));
    }

    #[test]
    fn guard_refuses_with_estimate() {
        let err = oracle_eta(&cfg(30, 1, 1), Mode::Up, &OracleOptions::default()).unwrap_err();
        match err {
            OracleError::Guard { estimate, .. } => assert!(estimate > 10_000_000_000),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn node_limit_refuses() {
        let opts = OracleOptions { guard: Guard { max_nodes: Some(5), ..Guard::default() }, ..Default::default() };
        assert!(matches!(oracle_eta(&cfg(8, 2, 2), Mode::Up, &opts), Err(OracleError::NodeLimit { .. })));
    }

    #[test]
    fn witnesses_reverify() {
        for mode in Mode::ALL {
            let r = oracle_eta(&cfg(5, 2, 1), mode, &OracleOptions::default()).unwrap();
            assert!(witness_reverifies(&r), "{mode}");
        }
    }

    #[test]
    fn execution_strategy_does_not_change_results() {
        for mode in Mode::ALL {
            let c = cfg(6, 2, 2);
            let seq = OracleOptions { exec: Exec::Sequential, ..Default::default() };
            let par = OracleOptions { exec: Exec::Parallel, ..Default::default() };
            assert_eq!(oracle_eta(&c, mode, &seq).unwrap(), oracle_eta(&c, mode, &par).unwrap(), "{mode}");
        }
    }
}
