use crate::closed_form::Rational;
use crate::exec::Exec;
use crate::index_set::IndexSet;
use crate::model::{CellAssociation, Mode, NetworkConfig};

use super::search::{ones, AssocPolicy, DownlinkSearch, UplinkSearch, UplinkState};
use super::{check_downlink, check_uplink, find_uplink_order, CheckError, DownlinkPlan, Evaluation, UplinkPlan};

pub const DEFAULT_BEST_PLANS_CAP: usize = 12;

/// Largest K for which `best_plans` runs its exhaustive inner search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCap(pub usize);

impl Default for SearchCap {
    fn default() -> Self {
        Self(DEFAULT_BEST_PLANS_CAP)
    }
}

/// Optimal session plans for a fixed association.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestPlans {
    pub downlink: Option<(DownlinkPlan, Evaluation)>,
    pub uplink: Option<(UplinkPlan, Evaluation)>,
    /// η for a single session; the average `(η_DL + η_UL)/2` for joint.
    pub score: Rational,
}

impl BestPlans {
    pub fn eta_downlink(&self) -> Option<usize> {
        self.downlink.as_ref().map(|(_, e)| e.eta)
    }

    pub fn eta_uplink(&self) -> Option<usize> {
        self.uplink.as_ref().map(|(_, e)| e.eta)
    }
}

/// Maximize η over all plans for a fixed association. In joint mode the two
/// sessions are optimized independently and may switch off different users.
pub fn best_plans(
    cfg: &NetworkConfig,
    assoc: &CellAssociation,
    mode: Mode,
    cap: SearchCap,
) -> Result<BestPlans, CheckError> {
    if cfg.k() > cap.0 {
        return Err(CheckError::CapExceeded { k: cfg.k(), cap: cap.0 });
    }
    assoc.validate(cfg)?;
    let downlink = mode.has_downlink().then(|| best_downlink(cfg, assoc)).transpose()?;
    let uplink = mode.has_uplink().then(|| best_uplink(cfg, assoc)).transpose()?;
    let score = match (&downlink, &uplink) {
        (Some((_, d)), Some((_, u))) => Rational::new((d.eta + u.eta) as u64, 2),
        (Some((_, e)), None) | (None, Some((_, e))) => Rational::from_integer(e.eta as u64),
        (None, None) => unreachable!("every mode has a session"),
    };
    Ok(BestPlans { downlink, uplink, score })
}

fn best_downlink(cfg: &NetworkConfig, assoc: &CellAssociation) -> Result<(DownlinkPlan, Evaluation), CheckError> {
    let mut search = DownlinkSearch::fixed(cfg, assoc);
    let active = search.best_active(0).expect("the empty plan is always feasible");
    let plan = DownlinkPlan::from_pairs(ones(active).map(|m| {
        let t = search.canonical_transmit(m, active).expect("active user has a feasible transmit set");
        (m, IndexSet::from_mask(t))
    }));
    let eval = check_downlink(cfg, assoc, &plan)?;
    Ok((plan, eval))
}

fn best_uplink(cfg: &NetworkConfig, assoc: &CellAssociation) -> Result<(UplinkPlan, Evaluation), CheckError> {
    let search =
        UplinkSearch { cfg, policy: AssocPolicy::Fixed(assoc), bonus: 0, floor: 0, split_depth: 0, max_nodes: None };
    let (found, _) = search.run(Exec::Sequential, || |st: &UplinkState, _| Some((st.count(), st.pairs())));
    let pairs = found.expect("the empty plan is always feasible").extra;
    let order = find_uplink_order(cfg, assoc, &pairs).expect("search only keeps orderable pair sets");
    let plan = UplinkPlan::new(pairs, order);
    let eval = check_uplink(cfg, assoc, &plan)?;
    Ok((plan, eval))
}
