use crate::closed_form::{gamma_d, pudof_joint_zf_inner};
use crate::model::{Mode, NetworkConfig};

use super::downlink::downlink_blocks;
use super::uplink::{full_uplink, split_uplink_blocks};
use super::{block_starts, Draft, SchemeError, SchemeOutput};

/// Parameters of the single-broadcast downlink overlay used when
/// `L + 1 <= Nc < 2L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JointSchemeParams {
    /// Silent terminals at the start of each block, `ceil(L/2)`.
    pub epsilon: usize,
    /// Parity `(L + 1) mod 2`.
    pub delta: usize,
    /// Guard gap between served groups, `2 epsilon`.
    pub chi: usize,
    /// Words delivered per block, `Nc - epsilon`.
    pub delivered: usize,
}

impl JointSchemeParams {
    /// `None` outside `L + 1 <= Nc < 2L`.
    pub fn new(l: usize, nc: usize) -> Option<Self> {
        if nc < l + 1 || nc >= 2 * l {
            return None;
        }
        let epsilon = l.div_ceil(2);
        let delta = (l + 1) % 2;
        Some(Self { epsilon, delta, chi: 2 * epsilon, delivered: epsilon + delta + nc - (l + 1) })
    }
}

/// One association shared by both sessions.
///
/// `Nc <= L`: the downlink blocks of width `2Nc + L`, with each served group
/// associated with its whole group of base stations; the uplink decodes the
/// same users as the split uplink construction.
///
/// `Nc >= L + 1`: every terminal keeps all base stations it reaches, so the
/// uplink decodes everyone. The downlink runs either one broadcast per block
/// of `Nc` (below `2L`) or the downlink blocks with budget `Nc - L`.
pub fn build_joint_scheme(cfg: &NetworkConfig) -> Result<SchemeOutput, SchemeError> {
    let (k, l, nc) = (cfg.k(), cfg.l(), cfg.nc());
    let claimed = pudof_joint_zf_inner(l as u64, nc as u64)?;
    let mut draft = Draft::default();
    let width = if nc <= l {
        let width = downlink_blocks(&mut draft, k, l, nc);
        split_uplink_blocks(&mut draft, k, l, nc);
        let (li, nci) = (l as i64, nc as i64);
        for s in block_starts(k, width) {
            let g = |local: i64| s + local - 1;
            for i in 1..=nci {
                draft.associate(g(i), (1..=nci).map(g));
            }
            for j in nci + li + 1..=2 * nci + li {
                draft.associate(g(j), (nci + 1..=2 * nci).map(g));
            }
        }
        width
    } else if let Some(params) = JointSchemeParams::new(l, nc) {
        full_uplink(&mut draft, cfg);
        debug_assert_eq!(
            gamma_d(l as u64, nc as u64)?.value(),
            num_rational::Ratio::new(params.delivered as u64, nc as u64)
        );
        let (eps, served) = (params.epsilon as i64, params.delivered as i64);
        for s in block_starts(k, nc) {
            let g = |local: i64| s + local - 1;
            for m in eps + 1..=eps + served {
                draft.transmit(g(m), (1..=served).map(g));
            }
        }
        nc
    } else {
        full_uplink(&mut draft, cfg);
        downlink_blocks(&mut draft, k, l, nc - l)
    };
    draft.finish(cfg, Mode::Joint, width, claimed)
}
