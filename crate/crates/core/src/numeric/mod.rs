//! Numeric cross-check of the combinatorial verdicts on random channels.
//!
//! Nonzero channel gains are real standard normal draws from a ChaCha8
//! stream seeded by a 64-bit seed, so a seed reproduces its realization
//! within this implementation (and no further).

mod linalg;
mod trials;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::{CellAssociation, NetworkConfig};
use crate::zf_eval::{check_downlink, check_uplink, DownlinkPlan, UplinkPlan};

use linalg::{dot, norm, RowBasis};

pub use trials::{run_trials, CheckerKind, TrialSummary};

/// Interference residual tolerance, relative.
pub const DEFAULT_TOL: f64 = 1e-8;
/// A desired signal below this fraction of its channel norm counts as lost.
pub const SIGNAL_FLOOR: f64 = 1e-6;
/// Below this the signal is unambiguously lost; between the two thresholds
/// the draw is treated as degenerate.
const SIGNAL_ZERO: f64 = 1e-10;
/// Relative contamination that unambiguously marks an uplink residual as dirty.
const CONTAMINATED: f64 = 1e-4;
const RANK_TOL: f64 = 1e-9;

/// Dense `K x K` real channel, `H[i][j]` from base station `j` to terminal `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    k: usize,
    entries: Vec<f64>,
    pub seed: u64,
}

impl ChannelRealization {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Gain from base station `j` to mobile terminal `i` (1-based).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1) * self.k + (j - 1)]
    }

    /// Copy with every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { k: self.k, entries: self.entries.iter().map(|x| x * c).collect(), seed: self.seed }
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.k)
    }
}

/// Draw a channel with the network's sparsity pattern.
pub fn realize_channel(cfg: &NetworkConfig, seed: u64) -> ChannelRealization {
    let k = cfg.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = vec![0.0; k * k];
    for i in 1..=k {
        for j in 1..=k {
            if cfg.connected(i, j) {
                entries[(i - 1) * k + (j - 1)] = loop {
                    let x: f64 = rng.sample(StandardNormal);
                    if x != 0.0 {
                        break x;
                    }
                };
            }
        }
    }
    ChannelRealization { k, entries, seed }
}

/// Outcome of a numeric feasibility test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumericVerdict {
    Feasible,
    /// The named terminal cannot be served cleanly.
    Infeasible {
        mt: usize,
    },
    /// The draw sits too close to a singular configuration to decide; redraw.
    Degenerate {
        mt: usize,
    },
}

/// Numeric verdict next to the combinatorial one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumericReport {
    pub numeric: NumericVerdict,
    pub combinatorial: bool,
}

impl NumericReport {
    pub fn is_degenerate(&self) -> bool {
        matches!(self.numeric, NumericVerdict::Degenerate { .. })
    }

    pub fn agrees(&self) -> bool {
        match self.numeric {
            NumericVerdict::Feasible => self.combinatorial,
            NumericVerdict::Infeasible { .. } => !self.combinatorial,
            NumericVerdict::Degenerate { .. } => false,
        }
    }
}

/// Build each message's beamformer as the part of its channel row that is
/// orthogonal to every other active receiver it reaches, and check that
/// enough signal survives while interference vanishes.
pub fn downlink_numeric(
    h: &ChannelRealization,
    assoc: &CellAssociation,
    plan: &DownlinkPlan,
    tol: f64,
) -> NumericVerdict {
    let active = plan.active_mts();
    for (&m, t) in plan.transmit_sets() {
        if m == 0 || m > h.k() || t.is_empty() || !t.is_subset(assoc.get(m)) || t.iter().any(|j| j > h.k()) {
            return NumericVerdict::Infeasible { mt: m };
        }
        let row = |r: usize| -> Vec<f64> { t.iter().map(|j| h.get(r, j)).collect() };
        let dest = row(m);
        let dest_norm = norm(&dest);
        if dest_norm == 0.0 {
            return NumericVerdict::Infeasible { mt: m };
        }
        let others: Vec<Vec<f64>> =
            active.iter().filter(|&r| r != m).map(row).filter(|r| r.iter().any(|&x| x != 0.0)).collect();
        let mut basis = RowBasis::default();
        for r in &others {
            basis.push(r, RANK_TOL);
        }
        let v = basis.residual(&dest);
        let signal = norm(&v) / dest_norm;
        if signal < SIGNAL_ZERO {
            return NumericVerdict::Infeasible { mt: m };
        }
        if signal < SIGNAL_FLOOR {
            return NumericVerdict::Degenerate { mt: m };
        }
        let vn = norm(&v);
        let leak = others.iter().map(|r| dot(r, &v).abs() / (norm(r) * vn)).fold(0.0, f64::max);
        if leak > tol {
            return NumericVerdict::Degenerate { mt: m };
        }
    }
    NumericVerdict::Feasible
}

/// [`downlink_numeric`] together with the combinatorial verdict.
pub fn verify_downlink_numeric(
    cfg: &NetworkConfig,
    h: &ChannelRealization,
    assoc: &CellAssociation,
    plan: &DownlinkPlan,
    tol: f64,
) -> NumericReport {
    NumericReport {
        numeric: downlink_numeric(h, assoc, plan, tol),
        combinatorial: check_downlink(cfg, assoc, plan).is_ok(),
    }
}

/// Simulate every decoded terminal sending a random symbol block, then walk
/// the decode order: each base station removes the words forwarded to it
/// and must be left with a clean multiple of its own terminal's block.
pub fn uplink_numeric(
    h: &ChannelRealization,
    assoc: &CellAssociation,
    plan: &UplinkPlan,
    tol: f64,
    symbol_seed: u64,
) -> NumericVerdict {
    let k = h.k();
    let samples = k + 2;
    let decoder: std::collections::BTreeMap<usize, usize> = plan.pairs().iter().copied().collect();
    let mut seen_bs = std::collections::BTreeSet::new();
    for (&m, &d) in &decoder {
        if m == 0 || m > k || d == 0 || d > k || h.get(m, d) == 0.0 || !assoc.get(m).contains(d) || !seen_bs.insert(d) {
            return NumericVerdict::Infeasible { mt: m };
        }
    }
    let ordered: std::collections::BTreeSet<usize> = plan.order().iter().copied().collect();
    if ordered.len() != plan.order().len() || !ordered.iter().eq(decoder.keys()) {
        let mt = plan.order().first().copied().unwrap_or(0);
        return NumericVerdict::Infeasible { mt };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(symbol_seed);
    let mut symbols = vec![Vec::new(); k + 1];
    for &m in decoder.keys() {
        symbols[m] = (0..samples).map(|_| rng.sample(StandardNormal)).collect::<Vec<f64>>();
    }
    let received = |j: usize| -> Vec<f64> {
        let mut y = vec![0.0; samples];
        for &m in decoder.keys() {
            let g = h.get(m, j);
            if g != 0.0 {
                y.iter_mut().zip(&symbols[m]).for_each(|(a, x)| *a += g * x);
            }
        }
        y
    };

    let mut estimates: Vec<Option<Vec<f64>>> = vec![None; k + 1];
    for &m in plan.order() {
        let d = decoder[&m];
        let mut r = received(d);
        for (other, est) in estimates.iter().enumerate() {
            if let Some(est) = est {
                if assoc.get(other).contains(d) {
                    let g = h.get(other, d);
                    r.iter_mut().zip(est).for_each(|(a, x)| *a -= g * x);
                }
            }
        }
        let x = &symbols[m];
        let c = dot(&r, x) / dot(x, x);
        let err: Vec<f64> = r.iter().zip(x).map(|(a, b)| a - c * b).collect();
        let dirt = norm(&err) / norm(&r).max(f64::MIN_POSITIVE);
        if dirt >= CONTAMINATED {
            return NumericVerdict::Infeasible { mt: m };
        }
        if dirt > tol {
            return NumericVerdict::Degenerate { mt: m };
        }
        let g = h.get(m, d);
        estimates[m] = Some(r.iter().map(|a| a / g).collect());
    }
    NumericVerdict::Feasible
}

/// [`uplink_numeric`] together with the combinatorial verdict.
pub fn verify_uplink_numeric(
    cfg: &NetworkConfig,
    h: &ChannelRealization,
    assoc: &CellAssociation,
    plan: &UplinkPlan,
    tol: f64,
) -> NumericReport {
    NumericReport {
        numeric: uplink_numeric(h, assoc, plan, tol, h.seed ^ 0x9e37_79b9_7f4a_7c15),
        combinatorial: check_uplink(cfg, assoc, plan).is_ok(),
    }
}
