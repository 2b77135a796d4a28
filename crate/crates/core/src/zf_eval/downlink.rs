use crate::index_set::IndexSet;
use crate::model::{CellAssociation, NetworkConfig};

use super::rank::{mask_row_independent, Matching};
use super::{CheckError, DownlinkFailure, DownlinkPlan, Evaluation};

/// Check that every active message can be zero-forced at all other active
/// receivers its transmit set reaches while still reaching its destination.
pub fn check_downlink(
    cfg: &NetworkConfig,
    assoc: &CellAssociation,
    plan: &DownlinkPlan,
) -> Result<Evaluation, CheckError> {
    assoc.validate(cfg)?;
    check_well_formed(cfg, assoc, plan)?;
    let active = plan.active_mts();
    for (&m, t) in plan.transmit_sets() {
        if let Err(failure) = nulling(cfg, m, t, &active) {
            return Err(CheckError::Downlink { mt: m, failure });
        }
    }
    Ok(Evaluation::from_active(cfg.k(), &active, None))
}

fn check_well_formed(cfg: &NetworkConfig, assoc: &CellAssociation, plan: &DownlinkPlan) -> Result<(), CheckError> {
    for (&m, t) in plan.transmit_sets() {
        if m == 0 || m > cfg.k() {
            return Err(CheckError::Malformed(format!("active mobile terminal {m} outside 1..={}", cfg.k())));
        }
        if t.is_empty() {
            return Err(CheckError::Malformed(format!("empty transmit set for W_{m}")));
        }
        if !t.is_subset(assoc.get(m)) {
            return Err(CheckError::Malformed(format!(
                "transmit set {t} of W_{m} is not contained in C_{m} = {}",
                assoc.get(m)
            )));
        }
    }
    Ok(())
}

/// Generic-channel nulling test for one message.
fn nulling(cfg: &NetworkConfig, m: usize, t: &IndexSet, active: &IndexSet) -> Result<(), DownlinkFailure> {
    let cols = t.as_slice();
    let row_of = |r: usize| -> Vec<usize> {
        cols.iter().enumerate().filter(|&(_, &j)| cfg.connected(r, j)).map(|(p, _)| p).collect()
    };
    let dest = row_of(m);
    if dest.is_empty() {
        return Err(DownlinkFailure::NotDelivered);
    }
    let constrained: Vec<Vec<usize>> =
        active.iter().filter(|&r| r != m).map(row_of).filter(|row| !row.is_empty()).collect();
    let mut matching = Matching::new(cols.len());
    for row in &constrained {
        matching.push(row);
    }
    let constraint_rank = matching.size();
    if matching.push(&dest) {
        Ok(())
    } else {
        Err(DownlinkFailure::NullingDeficit {
            constraints: constrained.len(),
            transmit_size: cols.len(),
            constraint_rank,
        })
    }
}

/// The plain dimension-counting rule: every active message reaches its
/// destination and has at most `|T_m| - 1` other active receivers in range.
///
/// This is necessary-and-sufficient only when the constrained rows are in
/// general position; with sparse, banded channels it can both accept plans
/// that no beamformer realizes and reject plans that one does. Kept for
/// comparison and as a negative control for numeric cross-validation.
pub fn counting_rule_holds(cfg: &NetworkConfig, plan: &DownlinkPlan) -> bool {
    let active = plan.active_mts();
    plan.transmit_sets().iter().all(|(&m, t)| {
        let reached = |r: usize| t.iter().any(|j| cfg.connected(r, j));
        let constraints = active.iter().filter(|&r| r != m && reached(r)).count();
        reached(m) && constraints < t.len()
    })
}

/// Bitmask of base stations heard by `mt`.
pub(crate) fn heard_mask(cfg: &NetworkConfig, mt: usize) -> u64 {
    let lo = cfg.first_bs(mt);
    range_mask(lo, mt)
}

/// Bits `lo..=hi` (1-based indices).
pub(crate) fn range_mask(lo: usize, hi: usize) -> u64 {
    if lo > hi {
        return 0;
    }
    let width = hi - lo + 1;
    let ones = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
    ones << (lo - 1)
}

/// Mask form of the nulling test used by the exhaustive searches.
/// `active` must include `m` or not; `m` itself is never a constraint.
pub(crate) fn nulling_feasible_mask(cfg: &NetworkConfig, m: usize, t: u64, active: u64) -> bool {
    let dest = heard_mask(cfg, m) & t;
    if dest == 0 {
        return false;
    }
    let mut rows = [0u64; 64];
    let mut n = 0;
    let mut others = active & !(1u64 << (m - 1));
    while others != 0 {
        let r = others.trailing_zeros() as usize + 1;
        others &= others - 1;
        let row = heard_mask(cfg, r) & t;
        if row != 0 {
            rows[n] = row;
            n += 1;
        }
    }
    mask_row_independent(&rows[..n], dest).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, l: usize, nc: usize) -> NetworkConfig {
        NetworkConfig::new(k, l, nc).unwrap()
    }

    fn assoc(sets: Vec<Vec<usize>>) -> CellAssociation {
        CellAssociation::new(sets.into_iter().map(IndexSet::from).collect())
    }

    #[test]
    fn single_bs_block_is_feasible() {
        let c = cfg(3, 1, 1);
        let a = assoc(vec![vec![1], vec![], vec![2]]);
        let plan = DownlinkPlan::from_pairs([(1, [1].into()), (3, [2].into())]);
        let e = check_downlink(&c, &a, &plan).unwrap();
        assert_eq!(e.eta, 2);
        assert_eq!(e.per_user_dof, vec![1, 0, 1]);
    }

    #[test]
    fn adjacent_singletons_are_infeasible() {
        let c = cfg(2, 1, 1);
        let a = assoc(vec![vec![1], vec![2]]);
        let plan = DownlinkPlan::from_pairs([(1, [1].into()), (2, [2].into())]);
        let err = check_downlink(&c, &a, &plan).unwrap_err();
        assert_eq!(
            err,
            CheckError::Downlink {
                mt: 1,
                failure: DownlinkFailure::NullingDeficit { constraints: 1, transmit_size: 1, constraint_rank: 1 }
            }
        );
    }

    #[test]
    fn second_broadcast_tight_case() {
        // L=2, Nc=2, K=6 block: W_6 from {3,4} must null at MT 5.
        let c = cfg(6, 2, 2);
        let a = assoc(vec![vec![1, 2], vec![2], vec![], vec![], vec![3], vec![3, 4]]);
        let plan = DownlinkPlan::from_pairs([(1, [1, 2].into()), (2, [2].into()), (5, [3].into()), (6, [3, 4].into())]);
        assert_eq!(check_downlink(&c, &a, &plan).unwrap().eta, 4);
    }

    #[test]
    fn undelivered_message_is_reported() {
        let c = cfg(4, 1, 1);
        let a = assoc(vec![vec![3], vec![], vec![], vec![]]);
        let plan = DownlinkPlan::from_pairs([(1, [3].into())]);
        assert_eq!(
            check_downlink(&c, &a, &plan).unwrap_err(),
            CheckError::Downlink { mt: 1, failure: DownlinkFailure::NotDelivered }
        );
    }

    #[test]
    fn transmit_set_must_be_associated() {
        let c = cfg(2, 1, 1);
        let a = assoc(vec![vec![1], vec![]]);
        let plan = DownlinkPlan::from_pairs([(1, [2].into())]);
        assert!(matches!(check_downlink(&c, &a, &plan), Err(CheckError::Malformed(_))));
    }

    #[test]
    fn counting_rule_overcounts_with_gapped_transmit_sets() {
        // L=3: MTs 2 and 3 both hear only BS 1 out of T={1,5}. One constraint,
        // two transmitters, yet nulling at MT 3 silences MT 2 as well.
        let c = cfg(6, 3, 2);
        let mut a = CellAssociation::empty(6);
        a.set(2, [1, 5].into());
        a.set(3, [3].into());
        let plan = DownlinkPlan::from_pairs([(2, [1, 5].into()), (3, [3].into())]);
        assert!(counting_rule_holds(&c, &plan));
        assert!(matches!(
            check_downlink(&c, &a, &plan),
            Err(CheckError::Downlink { mt: 2, failure: DownlinkFailure::NullingDeficit { .. } })
        ));
    }

    #[test]
    fn counting_rule_undercounts_redundant_constraints() {
        // L=2, T={1,5}: MTs 5,6,7 hear only BS 5 within T; zeroing BS 5 nulls all three.
        let c = cfg(7, 2, 2);
        let mut a = CellAssociation::empty(7);
        a.set(1, [1, 5].into());
        a.set(5, [5].into());
        a.set(6, [6].into());
        a.set(7, [7].into());
        let plan = DownlinkPlan::from_pairs([(1, [1, 5].into())]);
        let with_others = {
            let mut p = plan.clone();
            p.insert(5, [5].into());
            p.insert(6, [6].into());
            p.insert(7, [7].into());
            p
        };
        assert!(!counting_rule_holds(&c, &with_others));
        // W_1 alone is fine; the failure, if any, comes from W_5..W_7 among themselves.
        let err = check_downlink(&c, &a, &with_others).unwrap_err();
        assert!(!matches!(err, CheckError::Downlink { mt: 1, .. }));
    }

    #[test]
    fn mask_and_list_forms_agree() {
        let c = cfg(6, 2, 2);
        for m in 1..=6 {
            for t in 1u64..64 {
                for active in [0u64, 0b101101, 0b111111, 0b010010] {
                    let ts = IndexSet::from_mask(t);
                    let act = IndexSet::from_mask(active | 1 << (m - 1));
                    let list = nulling(&c, m, &ts, &act).is_ok();
                    assert_eq!(list, nulling_feasible_mask(&c, m, t, active), "m={m} t={t:b} a={active:b}");
                }
            }
        }
    }

    #[test]
    fn range_mask_bits() {
        assert_eq!(range_mask(1, 3), 0b111);
        assert_eq!(range_mask(3, 4), 0b1100);
        assert_eq!(range_mask(4, 3), 0);
        assert_eq!(range_mask(1, 64), u64::MAX);
    }
}
