//! Structural properties every decodable uplink pair set has.

use std::fmt;

use crate::model::NetworkConfig;
use crate::zf_eval::UplinkPlan;

use super::OracleResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// No two pairs where each terminal reaches the other's decoder.
    MutualInterference,
    /// Decoders increase with the terminal index.
    DecoderOrder,
    /// At most `Nc` pairs lie entirely inside any `L + 1` consecutive indices.
    WindowBudget,
}

/// A violated property and the pairs (or window) responsible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: Property,
    pub pairs: Vec<(usize, usize)>,
    /// Inclusive index window, for [`Property::WindowBudget`].
    pub window: Option<(usize, usize)>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.pairs.iter().map(|(m, d)| format!("({m},{d})")).collect();
        match (self.property, self.window) {
            (Property::WindowBudget, Some((a, b))) => {
                write!(f, "{} pairs inside window [{a},{b}]: {}", self.pairs.len(), pairs.join(" "))
            }
            (Property::MutualInterference, _) => write!(f, "mutually interfering pairs {}", pairs.join(" ")),
            _ => write!(f, "decoders out of order in {}", pairs.join(" ")),
        }
    }
}

/// Check all three properties on a plan's decoding pairs.
pub fn check_uplink_lemmas(cfg: &NetworkConfig, plan: &UplinkPlan) -> Result<(), Counterexample> {
    let pairs = plan.pairs();
    for (a, &(m1, b1)) in pairs.iter().enumerate() {
        for &(m2, b2) in &pairs[a + 1..] {
            if (m1 > m2) != (b1 > b2) {
                return Err(Counterexample {
                    property: Property::DecoderOrder,
                    pairs: vec![(m1, b1), (m2, b2)],
                    window: None,
                });
            }
            if cfg.connected(m1, b2) && cfg.connected(m2, b1) {
                return Err(Counterexample {
                    property: Property::MutualInterference,
                    pairs: vec![(m1, b1), (m2, b2)],
                    window: None,
                });
            }
        }
    }
    for load in window_loads(cfg, plan) {
        if load.pairs.len() > cfg.nc() {
            return Err(Counterexample {
                property: Property::WindowBudget,
                pairs: load.pairs,
                window: Some((load.start, load.end)),
            });
        }
    }
    Ok(())
}

/// Check the uplink witness of an oracle result. Results without an
/// uplink plan pass trivially.
pub fn verify_witness_lemmas(result: &OracleResult) -> Result<(), Counterexample> {
    match &result.witness.uplink {
        Some(plan) => check_uplink_lemmas(&result.config, plan),
        None => Ok(()),
    }
}

/// Pairs with both indices inside one window of `L + 1` consecutive indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowLoad {
    pub start: usize,
    pub end: usize,
    pub pairs: Vec<(usize, usize)>,
}

/// Load of every full window (the whole network if it is shorter).
pub fn window_loads(cfg: &NetworkConfig, plan: &UplinkPlan) -> Vec<WindowLoad> {
    let (k, l) = (cfg.k(), cfg.l());
    let last_start = k.saturating_sub(l).max(1);
    (1..=last_start)
        .map(|start| {
            let end = (start + l).min(k);
            let inside = |i: usize| (start..=end).contains(&i);
            let pairs = plan.pairs().iter().copied().filter(|&(m, d)| inside(m) && inside(d)).collect();
            WindowLoad { start, end, pairs }
        })
        .collect()
}
