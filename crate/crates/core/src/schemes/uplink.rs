use crate::closed_form::{blocked_uplink_value, pudof_downlink_zf, PuDoF, UplinkRange};
use crate::model::{Mode, NetworkConfig};
use crate::schemes::evaluate;

use super::{block_starts, Draft, SchemeError, SchemeOutput};

/// Uplink scheme for the range `(L, Nc)` falls in. In the gap between the
/// block constructions both are built and the one with more verified DoF is
/// kept (the split construction on ties).
pub fn build_uplink_scheme(cfg: &NetworkConfig) -> Result<SchemeOutput, SchemeError> {
    let (l, nc) = (cfg.l() as u64, cfg.nc() as u64);
    match UplinkRange::classify(l, nc) {
        UplinkRange::Full => full(cfg),
        UplinkRange::Blocked => blocked(cfg),
        UplinkRange::Split => split(cfg),
        UplinkRange::Gap => {
            let a = blocked(cfg)?;
            let b = split(cfg)?;
            let eta = |s: &SchemeOutput| evaluate(cfg, s).map(|e| e.eta);
            let key = |s: &SchemeOutput, eta| (eta, s.claimed);
            Ok(if key(&a, eta(&a)?) > key(&b, eta(&b)?) { a } else { b })
        }
    }
}

/// Every terminal associated with all base stations it reaches; decode from
/// the last user backwards, forwarding each word to the base stations it hits.
fn full(cfg: &NetworkConfig) -> Result<SchemeOutput, SchemeError> {
    let mut draft = Draft::default();
    full_uplink(&mut draft, cfg);
    draft.finish(cfg, Mode::Up, 1, PuDoF::one())
}

pub(super) fn full_uplink(draft: &mut Draft, cfg: &NetworkConfig) {
    let (k, l) = (cfg.k() as i64, cfg.l() as i64);
    for i in 1..=k {
        draft.associate(i, (i - l).max(1)..=i);
        draft.decode(i, i);
    }
    draft.order.extend((1..=k).rev());
}

/// Blocks of `L + 2`: the last `Nc + 1` terminals are decoded, `Nc` of them
/// at their own base station and one at the block's first base station.
/// Words that spill into the previous block are forwarded there, so blocks
/// are decoded from last to first.
fn blocked(cfg: &NetworkConfig) -> Result<SchemeOutput, SchemeError> {
    let (l, nc) = (cfg.l() as i64, cfg.nc() as i64);
    let width = (l + 2) as usize;
    let mut draft = Draft::default();
    for s in block_starts(cfg.k(), width).rev() {
        let g = |local: i64| s + local - 1;
        let prev = |local: i64| s - (l + 2) + local - 1;
        let first = l + 3 - nc;
        for i in first..=l + 2 {
            draft.decode(g(i), g(i));
        }
        draft.associate(g(l + 2), (first..=l + 2).map(g));
        for i in first..=l + 1 {
            draft.associate(g(i), (first..=i).map(g).chain([g(1)]).chain((i + 2..=l + 2).map(prev)));
        }
        let lone = l + 2 - nc;
        draft.decode(g(lone), g(1));
        draft.associate(g(lone), (l + 4 - nc..=l + 2).map(prev));
        draft.order.extend((first..=l + 2).rev().map(g));
        draft.order.push(g(lone));
    }
    let claimed = blocked_uplink_value(l as u64, nc as u64);
    draft.finish(cfg, Mode::Up, width, claimed)
}

/// Blocks of `2Nc + L`: the first `Nc` terminals at their own base stations,
/// decoded last to first, and the last `Nc` terminals at the base stations
/// `L` to their left, decoded first to last.
fn split(cfg: &NetworkConfig) -> Result<SchemeOutput, SchemeError> {
    let (l, nc) = (cfg.l(), cfg.nc());
    let mut draft = Draft::default();
    let width = split_uplink_blocks(&mut draft, cfg.k(), l, nc);
    let claimed = pudof_downlink_zf(l as u64, nc as u64)?;
    draft.finish(cfg, Mode::Up, width, claimed)
}

pub(super) fn split_uplink_blocks(draft: &mut Draft, k: usize, l: usize, nc: usize) -> usize {
    let width = 2 * nc + l;
    let (l, nc) = (l as i64, nc as i64);
    for s in block_starts(k, width) {
        let g = |local: i64| s + local - 1;
        for i in (1..=nc).rev() {
            draft.decode(g(i), g(i));
            draft.associate(g(i), (1..=i).map(g));
            draft.order.push(g(i));
        }
        for j in nc + l + 1..=2 * nc + l {
            draft.decode(g(j), g(j - l));
            draft.associate(g(j), (j - l..=2 * nc).map(g));
            draft.order.push(g(j));
        }
    }
    width
}
