use crate::closed_form::pudof_downlink_zf;
use crate::model::{Mode, NetworkConfig};

use super::{block_starts, Draft, SchemeError, SchemeOutput};

/// Two broadcast channels per block of `2Nc + L` users: the first `Nc`
/// terminals are served by the first `Nc` base stations, the last `Nc`
/// terminals by the next `Nc`. The middle `L` terminals and last `L` base
/// stations stay silent.
pub fn build_downlink_scheme(cfg: &NetworkConfig) -> Result<SchemeOutput, SchemeError> {
    let (l, nc) = (cfg.l(), cfg.nc());
    let mut draft = Draft::default();
    let width = downlink_blocks(&mut draft, cfg.k(), l, nc);
    let claimed = pudof_downlink_zf(l as u64, nc as u64)?;
    draft.finish(cfg, Mode::Down, width, claimed)
}

/// Lay out the downlink blocks for budget `nc`; returns the block width.
pub(super) fn downlink_blocks(draft: &mut Draft, k: usize, l: usize, nc: usize) -> usize {
    let width = 2 * nc + l;
    let (l, nc) = (l as i64, nc as i64);
    for s in block_starts(k, width) {
        let g = |local: i64| s + local - 1;
        for i in 1..=nc {
            draft.transmit(g(i), (i..=nc).map(g));
        }
        for i in nc + l + 1..=2 * nc + l {
            draft.transmit(g(i), (nc + 1..=i - l).map(g));
        }
    }
    width
}
