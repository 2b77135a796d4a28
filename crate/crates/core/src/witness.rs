//! JSON documents for schemes and oracle results.
//!
//! ```json
//! {"config":{"K":3,"L":1,"Nc":1},"mode":"down","associations":[[1],[],[2]],
//!  "downlink":{"active":[1,3],"transmit_sets":{"1":[1],"3":[2]}},"uplink":null,
//!  "eta":"2/1","pudof":"2/3"}
//! ```
//!
//! Rationals are always written `p/q`, integral ones included.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closed_form::{fmt_rational, parse_rational, PuDoF, Rational};
use crate::index_set::IndexSet;
use crate::model::{CellAssociation, Mode, ModelError, NetworkConfig};
use crate::oracle::{OracleResult, Witness};
use crate::schemes::{SchemeEvaluation, SchemeOutput};
use crate::zf_eval::{DownlinkPlan, UplinkPlan};

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("field {field}: {reason}")]
    Field { field: &'static str, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigDoc {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "Nc")]
    pub nc: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownlinkDoc {
    pub active: Vec<usize>,
    pub transmit_sets: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UplinkDoc {
    pub pairs: Vec<(usize, usize)>,
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub config: ConfigDoc,
    pub mode: Mode,
    pub associations: Vec<Vec<usize>>,
    pub downlink: Option<DownlinkDoc>,
    pub uplink: Option<UplinkDoc>,
    pub eta: String,
    pub pudof: String,
}

/// Decoded contents of a [`WitnessDoc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessParts {
    pub config: NetworkConfig,
    pub mode: Mode,
    pub witness: Witness,
    pub eta: Rational,
    pub pudof: PuDoF,
}

impl WitnessDoc {
    pub fn new(cfg: &NetworkConfig, mode: Mode, witness: &Witness, eta: Rational, pudof: PuDoF) -> Self {
        Self {
            config: ConfigDoc { k: cfg.k(), l: cfg.l(), nc: cfg.nc() },
            mode,
            associations: witness.assoc.sets().iter().map(|s| s.as_slice().to_vec()).collect(),
            downlink: witness.downlink.as_ref().map(|p| DownlinkDoc {
                active: p.active_mts().as_slice().to_vec(),
                transmit_sets: p.transmit_sets().iter().map(|(&m, t)| (m, t.as_slice().to_vec())).collect(),
            }),
            uplink: witness.uplink.as_ref().map(|p| UplinkDoc { pairs: p.pairs().to_vec(), order: p.order().to_vec() }),
            eta: fmt_rational(&eta),
            pudof: fmt_rational(&pudof.value()),
        }
    }

    pub fn from_oracle(r: &OracleResult) -> Self {
        Self::new(&r.config, r.mode, &r.witness, r.eta, r.pudof())
    }

    pub fn from_scheme(cfg: &NetworkConfig, scheme: &SchemeOutput, eval: &SchemeEvaluation) -> Self {
        let w =
            Witness { assoc: scheme.assoc.clone(), downlink: scheme.downlink.clone(), uplink: scheme.uplink.clone() };
        Self::new(cfg, scheme.mode, &w, eval.eta, eval.pudof)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness documents always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, WitnessError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Rebuild typed values. Checks shape only, not feasibility.
    pub fn parts(&self) -> Result<WitnessParts, WitnessError> {
        let config = NetworkConfig::new(self.config.k, self.config.l, self.config.nc)?;
        if self.associations.len() != config.k() {
            return Err(field(
                "associations",
                format!("expected {} sets, got {}", config.k(), self.associations.len()),
            ));
        }
        let assoc = CellAssociation::new(self.associations.iter().map(|s| IndexSet::from(s.clone())).collect());
        let downlink = self
            .downlink
            .as_ref()
            .map(|d| {
                let plan =
                    DownlinkPlan::from_pairs(d.transmit_sets.iter().map(|(&m, t)| (m, IndexSet::from(t.clone()))));
                if plan.active_mts().as_slice() != d.active.as_slice() {
                    return Err(field("downlink.active", "does not match the transmit_sets keys".into()));
                }
                Ok(plan)
            })
            .transpose()?;
        let uplink = self.uplink.as_ref().map(|u| UplinkPlan::new(u.pairs.clone(), u.order.clone()));
        if downlink.is_some() != self.mode.has_downlink() || uplink.is_some() != self.mode.has_uplink() {
            return Err(field("mode", format!("sessions present do not match mode {}", self.mode)));
        }
        let eta = parse_rational(&self.eta).ok_or_else(|| field("eta", format!("not a rational: {:?}", self.eta)))?;
        let pudof = parse_rational(&self.pudof)
            .and_then(|r| PuDoF::from_ratio(r).ok())
            .ok_or_else(|| field("pudof", format!("not a puDoF: {:?}", self.pudof)))?;
        Ok(WitnessParts { config, mode: self.mode, witness: Witness { assoc, downlink, uplink }, eta, pudof })
    }
}

fn field(field: &'static str, reason: String) -> WitnessError {
    WitnessError::Field { field, reason }
}
