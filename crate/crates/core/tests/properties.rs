mod common;

use proptest::prelude::*;

use cellzf::closed_form::{fmt_rational, parse_rational, pudof_downlink_zf};
use cellzf::numeric::{downlink_numeric, realize_channel, uplink_numeric, NumericVerdict, DEFAULT_TOL};
use cellzf::oracle::{check_uplink_lemmas, oracle_eta, window_loads, OracleOptions, Witness};
use cellzf::witness::WitnessDoc;
use cellzf::zf_eval::{check_downlink, check_uplink, find_uplink_order, DownlinkPlan, UplinkPlan};
use cellzf::{CellAssociation, Exec, IndexSet, Mode, NetworkConfig, Rational};

use common::cfg;

fn network(max_k: usize, max_l: usize, max_nc: usize) -> impl Strategy<Value = NetworkConfig> {
    (1..=max_k, 1..=max_l, 1..=max_nc).prop_map(|(k, l, nc)| cfg(k, l, nc))
}

/// Decoder choices per terminal: `None` or an offset into its heard base stations.
fn uplink_case() -> impl Strategy<Value = (NetworkConfig, Vec<Option<usize>>)> {
    network(9, 3, 3).prop_flat_map(|c| {
        let picks = proptest::collection::vec(proptest::option::of(0..=c.l()), c.k());
        (Just(c), picks)
    })
}

/// Pairs with distinct decoders and their minimal association, if within budget.
fn build_uplink(c: &NetworkConfig, picks: &[Option<usize>]) -> Option<(CellAssociation, Vec<(usize, usize)>)> {
    let mut used = IndexSet::new();
    let mut pairs = Vec::new();
    for (i, p) in picks.iter().enumerate() {
        let m = i + 1;
        if let Some(off) = p {
            let d = m.saturating_sub(*off).max(1);
            if used.insert(d) {
                pairs.push((m, d));
            }
        }
    }
    let assoc = CellAssociation::new(
        (1..=c.k())
            .map(|m| {
                if pairs.iter().any(|&(x, _)| x == m) {
                    used.iter().filter(|&d| c.connected(m, d)).collect()
                } else {
                    IndexSet::new()
                }
            })
            .collect(),
    );
    assoc.validate(c).ok()?;
    Some((assoc, pairs))
}

/// Downlink plan with transmit sets drawn near each terminal, used as the association.
fn downlink_case() -> impl Strategy<Value = (NetworkConfig, Vec<Option<u64>>)> {
    network(7, 3, 3).prop_flat_map(|c| {
        let sets = proptest::collection::vec(proptest::option::of(1u64..1 << c.k()), c.k());
        (Just(c), sets)
    })
}

fn build_downlink(c: &NetworkConfig, sets: &[Option<u64>]) -> (CellAssociation, DownlinkPlan) {
    let t: Vec<IndexSet> = sets
        .iter()
        .map(|s| {
            let s = IndexSet::from_mask(s.unwrap_or(0));
            s.iter().take(c.nc()).collect()
        })
        .collect();
    let plan =
        DownlinkPlan::from_pairs(t.iter().enumerate().filter(|(_, s)| !s.is_empty()).map(|(i, s)| (i + 1, s.clone())));
    (CellAssociation::new(t), plan)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn feasible_uplinks_satisfy_lemmas((c, picks) in uplink_case()) {
        if let Some((assoc, pairs)) = build_uplink(&c, &picks) {
            if let Some(order) = find_uplink_order(&c, &assoc, &pairs) {
                let plan = UplinkPlan::new(pairs, order);
                prop_assert!(check_uplink(&c, &assoc, &plan).is_ok());
                prop_assert!(check_uplink_lemmas(&c, &plan).is_ok());
                for w in window_loads(&c, &plan) {
                    prop_assert!(w.pairs.len() <= c.nc(), "{c}: window {}..{} holds {:?}", w.start, w.end, w.pairs);
                }
            }
        }
    }

    #[test]
    fn uplink_prefixes_stay_feasible((c, picks) in uplink_case()) {
        if let Some((assoc, pairs)) = build_uplink(&c, &picks) {
            if let Some(order) = find_uplink_order(&c, &assoc, &pairs) {
                let plan = UplinkPlan::new(pairs, order);
                for n in 0..=plan.len() {
                    prop_assert!(check_uplink(&c, &assoc, &plan.order_prefix(n)).is_ok());
                }
            }
        }
    }

    #[test]
    fn downlink_is_monotone_in_active_set((c, sets) in downlink_case()) {
        let (assoc, plan) = build_downlink(&c, &sets);
        if check_downlink(&c, &assoc, &plan).is_ok() {
            for m in plan.active_mts().iter() {
                prop_assert!(check_downlink(&c, &assoc, &plan.without(m)).is_ok());
            }
        }
    }

    #[test]
    fn downlink_is_monotone_in_transmit_sets((c, sets) in downlink_case(), extra in 1u64..128) {
        let (assoc, plan) = build_downlink(&c, &sets);
        if check_downlink(&c, &assoc, &plan).is_ok() {
            // enlarge every transmit set; the budget is lifted so only nulling matters
            let wide = cfg(c.k(), c.l(), c.k());
            let grown: Vec<(usize, IndexSet)> = plan
                .transmit_sets()
                .iter()
                .map(|(&m, t)| (m, t.union(&IndexSet::from_mask(extra & ((1u64 << c.k()) - 1)))))
                .collect();
            let assoc2 = CellAssociation::new((1..=c.k()).map(|m| {
                grown.iter().find(|(x, _)| *x == m).map(|(_, t)| t.clone()).unwrap_or_else(|| assoc.get(m).clone())
            }).collect());
            prop_assert!(check_downlink(&wide, &assoc2, &DownlinkPlan::from_pairs(grown)).is_ok());
        }
    }

    #[test]
    fn numeric_agrees_with_checker_on_downlink((c, sets) in downlink_case(), seed in any::<u64>()) {
        let (assoc, plan) = build_downlink(&c, &sets);
        let h = realize_channel(&c, seed);
        let numeric = downlink_numeric(&h, &assoc, &plan, DEFAULT_TOL);
        prop_assume!(!matches!(numeric, NumericVerdict::Degenerate { .. }));
        prop_assert_eq!(numeric == NumericVerdict::Feasible, check_downlink(&c, &assoc, &plan).is_ok());
    }

    #[test]
    fn numeric_agrees_with_checker_on_uplink((c, picks) in uplink_case(), seed in any::<u64>(), shuffle in any::<bool>()) {
        if let Some((assoc, pairs)) = build_uplink(&c, &picks) {
            let mut order: Vec<usize> = pairs.iter().map(|&(m, _)| m).collect();
            if shuffle {
                order.reverse();
            } else if let Some(o) = find_uplink_order(&c, &assoc, &pairs) {
                order = o;
            }
            let plan = UplinkPlan::new(pairs, order);
            let h = realize_channel(&c, seed);
            let numeric = uplink_numeric(&h, &assoc, &plan, DEFAULT_TOL, seed.rotate_left(7));
            prop_assume!(!matches!(numeric, NumericVerdict::Degenerate { .. }));
            prop_assert_eq!(numeric == NumericVerdict::Feasible, check_uplink(&c, &assoc, &plan).is_ok());
        }
    }

    #[test]
    fn numeric_verdicts_are_scale_invariant((c, sets) in downlink_case(), seed in any::<u64>(), scale in prop_oneof![-1e3..-1e-3, 1e-3..1e3f64]) {
        let (assoc, plan) = build_downlink(&c, &sets);
        let h = realize_channel(&c, seed);
        prop_assert_eq!(
            downlink_numeric(&h, &assoc, &plan, DEFAULT_TOL),
            downlink_numeric(&h.scaled(scale), &assoc, &plan, DEFAULT_TOL)
        );
    }

    #[test]
    fn channel_support_matches_topology(c in network(8, 5, 1), seed in any::<u64>()) {
        let h = realize_channel(&c, seed);
        for i in 1..=c.k() {
            for j in 1..=c.k() {
                prop_assert_eq!(h.get(i, j) != 0.0, c.connected(i, j));
            }
        }
    }

    #[test]
    fn witness_documents_round_trip((c, picks) in uplink_case(), (_, sets) in downlink_case()) {
        let Some((assoc, pairs)) = build_uplink(&c, &picks) else { return Ok(()) };
        let order: Vec<usize> = pairs.iter().map(|&(m, _)| m).rev().collect();
        let down = {
            let sets: Vec<Option<u64>> = (0..c.k()).map(|i| sets.get(i).copied().flatten()).collect();
            build_downlink(&c, &sets).1
        };
        let w = Witness { assoc, downlink: Some(down), uplink: Some(UplinkPlan::new(pairs, order)) };
        let eta = Rational::new(3, 2);
        let doc = WitnessDoc::new(&c, Mode::Joint, &w, eta, cellzf::PuDoF::new(0, 1).unwrap());
        let back = WitnessDoc::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&back, &doc);
        let parts = back.parts().unwrap();
        prop_assert_eq!(parts.witness, w);
        prop_assert_eq!(parts.eta, eta);
        prop_assert_eq!(parts.config, c);
    }

    #[test]
    fn rationals_round_trip(n in 0u64..10_000, d in 1u64..10_000) {
        let r = Rational::new(n, d);
        let s = fmt_rational(&r);
        prop_assert!(s.contains('/'));
        prop_assert_eq!(parse_rational(&s), Some(r));
    }

    #[test]
    fn downlink_formula_orders(l in 1u64..30, nc in 1u64..30) {
        let v = pudof_downlink_zf(l, nc).unwrap().value();
        prop_assert!(v > Rational::from_integer(0) && v < Rational::from_integer(1));
        prop_assert!(pudof_downlink_zf(l, nc + 1).unwrap().value() > v);
        prop_assert!(pudof_downlink_zf(l + 1, nc).unwrap().value() < v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_is_independent_of_execution(c in network(7, 2, 2), mode in prop_oneof![Just(Mode::Down), Just(Mode::Up), Just(Mode::Joint)]) {
        let seq = oracle_eta(&c, mode, &OracleOptions { exec: Exec::Sequential, ..Default::default() }).unwrap();
        let par = oracle_eta(&c, mode, &OracleOptions { exec: Exec::Parallel, ..Default::default() }).unwrap();
        prop_assert_eq!(seq, par);
    }

    #[test]
    fn oracle_grows_with_network(c in network(7, 2, 2), mode in prop_oneof![Just(Mode::Down), Just(Mode::Up), Just(Mode::Joint)]) {
        // dropping the last user cannot raise the optimum, nor lower it by more than one
        let opts = OracleOptions::default();
        let big = oracle_eta(&c.with_k(c.k() + 1).unwrap(), mode, &opts).unwrap().eta;
        let small = oracle_eta(&c, mode, &opts).unwrap().eta;
        prop_assert!(small <= big && big <= small + Rational::from_integer(1));
    }
}
