//! Block constructions of cell associations and session plans.
//!
//! Every construction tiles the network with identical blocks. Blocks are
//! laid out on a virtual network long enough to hold whole blocks and then
//! restricted to `1..=K`: references to base stations outside the network are
//! dropped, and a user whose own terminal or serving base station does not
//! exist is switched off. The result is always re-checked.

mod downlink;
mod joint;
mod uplink;

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use thiserror::Error;

use crate::closed_form::{ClosedFormError, PuDoF, Rational};
use crate::index_set::IndexSet;
use crate::model::{CellAssociation, Mode, ModelError, NetworkConfig};
use crate::zf_eval::{check_downlink, check_uplink, CheckError, DownlinkPlan, Evaluation, UplinkPlan};

pub use downlink::build_downlink_scheme;
pub use joint::{build_joint_scheme, JointSchemeParams};
pub use uplink::build_uplink_scheme;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("construction exceeds the association budget: {0}")]
    Budget(#[from] ModelError),
    #[error("construction failed verification: {0}")]
    Verification(#[from] CheckError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

/// An association together with the plans that use it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeOutput {
    pub mode: Mode,
    pub assoc: CellAssociation,
    pub downlink: Option<DownlinkPlan>,
    pub uplink: Option<UplinkPlan>,
    pub block_width: usize,
    /// Asymptotic per-user DoF the construction is designed for. For joint
    /// schemes this is the average over the two sessions.
    pub claimed: PuDoF,
}

/// Checker results for a scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeEvaluation {
    pub downlink: Option<Evaluation>,
    pub uplink: Option<Evaluation>,
    /// Session puDoF, or the two-session average for joint schemes.
    pub pudof: PuDoF,
    /// Sum DoF for one session, `(η_DL + η_UL)/2` for joint.
    pub eta: Rational,
}

impl SchemeEvaluation {
    pub fn eta_downlink(&self) -> Option<usize> {
        self.downlink.as_ref().map(|e| e.eta)
    }

    pub fn eta_uplink(&self) -> Option<usize> {
        self.uplink.as_ref().map(|e| e.eta)
    }

    pub fn decode_depth(&self) -> Option<usize> {
        self.uplink.as_ref().and_then(|e| e.decode_depth)
    }
}

/// Run the checkers on every plan of `scheme`.
pub fn evaluate(cfg: &NetworkConfig, scheme: &SchemeOutput) -> Result<SchemeEvaluation, CheckError> {
    let downlink = scheme.downlink.as_ref().map(|p| check_downlink(cfg, &scheme.assoc, p)).transpose()?;
    let uplink = scheme.uplink.as_ref().map(|p| check_uplink(cfg, &scheme.assoc, p)).transpose()?;
    let sessions: Vec<usize> = downlink.iter().chain(uplink.iter()).map(|e| e.eta).collect();
    let eta = Ratio::new(sessions.iter().sum::<usize>() as u64, sessions.len().max(1) as u64);
    let pudof = PuDoF::from_ratio(eta / Ratio::from_integer(cfg.k() as u64)).expect("eta <= K");
    Ok(SchemeEvaluation { downlink, uplink, pudof, eta })
}

/// Build the scheme for `mode`.
pub fn build_scheme(cfg: &NetworkConfig, mode: Mode) -> Result<SchemeOutput, SchemeError> {
    match mode {
        Mode::Down => build_downlink_scheme(cfg),
        Mode::Up => build_uplink_scheme(cfg),
        Mode::Joint => build_joint_scheme(cfg),
    }
}

/// Block starts covering `1..=k`, the last block possibly extending past `k`.
fn block_starts(k: usize, width: usize) -> impl DoubleEndedIterator<Item = i64> {
    let blocks = k.div_ceil(width);
    (0..blocks).map(move |b| (b * width + 1) as i64)
}

/// Scheme under construction, in virtual coordinates that may fall outside `1..=K`.
#[derive(Debug, Default)]
struct Draft {
    assoc: BTreeMap<i64, BTreeSet<i64>>,
    transmit: BTreeMap<i64, Vec<i64>>,
    pairs: Vec<(i64, i64)>,
    order: Vec<i64>,
}

impl Draft {
    fn associate(&mut self, m: i64, bss: impl IntoIterator<Item = i64>) {
        self.assoc.entry(m).or_default().extend(bss);
    }

    fn transmit(&mut self, m: i64, t: impl IntoIterator<Item = i64>) {
        let t: Vec<i64> = t.into_iter().collect();
        self.associate(m, t.iter().copied());
        self.transmit.insert(m, t);
    }

    fn decode(&mut self, m: i64, d: i64) {
        self.associate(m, [d]);
        self.pairs.push((m, d));
    }

    fn finish(
        self,
        cfg: &NetworkConfig,
        mode: Mode,
        block_width: usize,
        claimed: PuDoF,
    ) -> Result<SchemeOutput, SchemeError> {
        let k = cfg.k() as i64;
        let inside = |i: i64| (1..=k).contains(&i);
        let mut assoc = CellAssociation::empty(cfg.k());
        for (&m, set) in self.assoc.iter().filter(|(&m, _)| inside(m)) {
            assoc.set(m as usize, set.iter().copied().filter(|&j| inside(j)).map(|j| j as usize).collect());
        }
        assoc.validate(cfg)?;

        let downlink = mode.has_downlink().then(|| {
            DownlinkPlan::from_pairs(self.transmit.iter().filter(|(&m, _)| inside(m)).filter_map(|(&m, t)| {
                let t: IndexSet = t.iter().copied().filter(|&j| inside(j)).map(|j| j as usize).collect();
                let reaches = t.iter().any(|j| cfg.connected(m as usize, j));
                reaches.then_some((m as usize, t))
            }))
        });
        let uplink = mode.has_uplink().then(|| {
            let pairs: Vec<(usize, usize)> = self
                .pairs
                .iter()
                .filter(|&&(m, d)| inside(m) && inside(d))
                .map(|&(m, d)| (m as usize, d as usize))
                .collect();
            let kept: BTreeSet<usize> = pairs.iter().map(|&(m, _)| m).collect();
            let order = self.order.iter().map(|&m| m as usize).filter(|m| kept.contains(m)).collect();
            UplinkPlan::new(pairs, order)
        });

        let out = SchemeOutput { mode, assoc, downlink, uplink, block_width, claimed };
        evaluate(cfg, &out)?;
        Ok(out)
    }
}
