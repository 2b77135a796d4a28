//! Seeded Monte-Carlo agreement runs between the numeric and combinatorial engines.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;
use crate::index_set::IndexSet;
use crate::model::{CellAssociation, Mode, NetworkConfig};
use crate::schemes::{build_scheme, SchemeError, SchemeOutput};
use crate::zf_eval::{
    check_downlink, check_uplink, find_uplink_order, CheckError, DownlinkFailure, DownlinkPlan, UplinkPlan,
};

use super::{downlink_numeric, realize_channel, uplink_numeric, NumericVerdict};

/// Redraws allowed per trial before a degenerate draw counts as unresolved.
pub const MAX_REDRAWS: u32 = 10;

/// Which combinatorial verdict the numeric engine is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckerKind {
    #[default]
    Honest,
    /// Deliberately broken checker: ignores nulling on the downlink and
    /// everything but well-formedness on the uplink. Used as a negative control.
    Tampered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub trials: usize,
    pub agreements: usize,
    /// Degenerate draws that were replaced by a fresh channel.
    pub redraws: u64,
    /// Trials still degenerate after [`MAX_REDRAWS`] redraws.
    pub unresolved: usize,
    /// Trial indices whose verdicts disagreed.
    pub disagreements: Vec<usize>,
}

impl TrialSummary {
    pub fn agreement(&self) -> f64 {
        if self.trials == 0 {
            1.0
        } else {
            self.agreements as f64 / self.trials as f64
        }
    }
}

/// Run `trials` independent trials. Even trials check the scheme's own plans,
/// odd trials a random well-formed plan (roughly half infeasible). In joint
/// mode a trial agrees only if both sessions agree.
pub fn run_trials(
    cfg: &NetworkConfig,
    mode: Mode,
    trials: usize,
    seed: u64,
    tol: f64,
    checker: CheckerKind,
    exec: Exec,
) -> Result<TrialSummary, SchemeError> {
    let scheme = build_scheme(cfg, mode)?;
    let outcomes = exec.map((0..trials).collect(), |t| run_one(cfg, &scheme, t, seed, tol, checker));
    let mut summary = TrialSummary { trials, agreements: 0, redraws: 0, unresolved: 0, disagreements: Vec::new() };
    for (t, o) in outcomes.into_iter().enumerate() {
        summary.redraws += o.redraws;
        match o.agrees {
            Some(true) => summary.agreements += 1,
            Some(false) => summary.disagreements.push(t),
            None => summary.unresolved += 1,
        }
    }
    Ok(summary)
}

struct Outcome {
    agrees: Option<bool>,
    redraws: u64,
}

fn trial_seed(seed: u64, t: usize) -> u64 {
    seed ^ (t as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn run_one(cfg: &NetworkConfig, scheme: &SchemeOutput, t: usize, seed: u64, tol: f64, checker: CheckerKind) -> Outcome {
    let base = trial_seed(seed, t);
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    let (assoc, down, up) = if t.is_multiple_of(2) {
        (scheme.assoc.clone(), scheme.downlink.clone(), scheme.uplink.clone())
    } else {
        let assoc = random_association(cfg, &mut rng);
        let down = scheme.mode.has_downlink().then(|| random_downlink(cfg, &assoc, &mut rng));
        let up = scheme.mode.has_uplink().then(|| random_uplink(cfg, &assoc, &mut rng));
        (assoc, down, up)
    };
    let claim_down = down.as_ref().map(|p| combinatorial_downlink(cfg, &assoc, p, checker));
    let claim_up = up.as_ref().map(|p| combinatorial_uplink(cfg, &assoc, p, checker));

    for redraw in 0..=MAX_REDRAWS {
        let channel_seed = base.wrapping_add(redraw as u64);
        let h = realize_channel(cfg, channel_seed);
        let mut agrees = true;
        let mut degenerate = false;
        if let (Some(p), Some(claim)) = (&down, claim_down) {
            match downlink_numeric(&h, &assoc, p, tol) {
                NumericVerdict::Degenerate { .. } => degenerate = true,
                v => agrees &= (v == NumericVerdict::Feasible) == claim,
            }
        }
        if let (Some(p), Some(claim)) = (&up, claim_up) {
            match uplink_numeric(&h, &assoc, p, tol, !channel_seed) {
                NumericVerdict::Degenerate { .. } => degenerate = true,
                v => agrees &= (v == NumericVerdict::Feasible) == claim,
            }
        }
        if !degenerate {
            return Outcome { agrees: Some(agrees), redraws: redraw as u64 };
        }
    }
    Outcome { agrees: None, redraws: MAX_REDRAWS as u64 }
}

fn combinatorial_downlink(
    cfg: &NetworkConfig,
    assoc: &CellAssociation,
    plan: &DownlinkPlan,
    checker: CheckerKind,
) -> bool {
    matches!(
        (check_downlink(cfg, assoc, plan), checker),
        (Ok(_), _)
            | (
                Err(CheckError::Downlink { failure: DownlinkFailure::NullingDeficit { .. }, .. }),
                CheckerKind::Tampered
            )
    )
}

fn combinatorial_uplink(cfg: &NetworkConfig, assoc: &CellAssociation, plan: &UplinkPlan, checker: CheckerKind) -> bool {
    matches!(
        (check_uplink(cfg, assoc, plan), checker),
        (Ok(_), _) | (Err(CheckError::Uplink { .. }), CheckerKind::Tampered)
    )
}

/// Budget-respecting association drawn from base stations near each terminal.
fn random_association(cfg: &NetworkConfig, rng: &mut ChaCha8Rng) -> CellAssociation {
    let k = cfg.k();
    let (l, nc) = (cfg.l() as i64, cfg.nc());
    let mut sets = vec![IndexSet::new(); k];
    for m in 1..=k {
        let lo = (m as i64 - l - 1).max(1) as usize;
        let hi = (m + 1).min(k);
        let mut pool: Vec<usize> = (lo..=hi).collect();
        pool.shuffle(rng);
        let want = rng.random_range(1..=nc);
        for j in pool {
            if sets[m - 1].len() == want {
                break;
            }
            sets[m - 1].insert(j);
        }
    }
    CellAssociation::new(sets)
}

fn random_downlink(cfg: &NetworkConfig, assoc: &CellAssociation, rng: &mut ChaCha8Rng) -> DownlinkPlan {
    DownlinkPlan::from_pairs((1..=cfg.k()).filter_map(|m| {
        let c = assoc.get(m);
        if c.is_empty() || !rng.random_bool(0.6) {
            return None;
        }
        let t: IndexSet = c.iter().filter(|_| rng.random_bool(0.7)).collect();
        let t = if t.is_empty() { IndexSet::singleton(c.as_slice()[rng.random_range(0..c.len())]) } else { t };
        Some((m, t))
    }))
}

/// Distinct decoders drawn from each terminal's connected associated
/// stations, in a random order that is repaired half of the time.
fn random_uplink(cfg: &NetworkConfig, assoc: &CellAssociation, rng: &mut ChaCha8Rng) -> UplinkPlan {
    let mut users: Vec<usize> = (1..=cfg.k()).collect();
    users.shuffle(rng);
    let mut used = IndexSet::new();
    let mut pairs = Vec::new();
    for m in users {
        if !rng.random_bool(0.6) {
            continue;
        }
        let choices: Vec<usize> = assoc.get(m).iter().filter(|&d| cfg.connected(m, d) && !used.contains(d)).collect();
        if let Some(&d) = choices.get(rng.random_range(0..choices.len().max(1))) {
            used.insert(d);
            pairs.push((m, d));
        }
    }
    let mut order: Vec<usize> = pairs.iter().map(|&(m, _)| m).collect();
    order.shuffle(rng);
    if rng.random_bool(0.5) {
        if let Some(fixed) = find_uplink_order(cfg, assoc, &pairs) {
            order = fixed;
        }
    }
    UplinkPlan::new(pairs, order)
}
