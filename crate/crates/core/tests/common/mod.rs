#![allow(dead_code)]

use std::path::PathBuf;

use cellzf::zf_eval::{find_uplink_order, DownlinkPlan, UplinkPlan};
use cellzf::{CellAssociation, IndexSet, NetworkConfig};

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// `(file name, argv)` for every golden case.
pub fn golden_cases() -> Vec<(String, Vec<String>)> {
    let text = std::fs::read_to_string(golden_dir().join("cases.txt")).expect("cases.txt");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (name, args) = l.split_once('|').expect("name|args");
            (name.to_string(), args.split_whitespace().map(String::from).collect())
        })
        .collect()
}

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cellzf").chain(args.iter().copied());
    let code = cellzf::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Compare every golden case byte for byte; returns the names that differ.
pub fn golden_mismatches() -> Vec<String> {
    golden_cases()
        .into_iter()
        .filter_map(|(name, args)| {
            let argv: Vec<&str> = args.iter().map(String::as_str).collect();
            let (code, out, _) = run_cli(&argv);
            let want = std::fs::read_to_string(golden_dir().join(&name)).unwrap_or_default();
            (code != 0 || out != want).then_some(name)
        })
        .collect()
}

pub fn cfg(k: usize, l: usize, nc: usize) -> NetworkConfig {
    NetworkConfig::new(k, l, nc).unwrap()
}

/// Every orderable uplink plan whose minimal association fits the budget,
/// together with that association. Exponential; keep `K` small.
pub fn all_feasible_uplinks(c: &NetworkConfig) -> Vec<(CellAssociation, UplinkPlan)> {
    let mut out = Vec::new();
    let mut decoder = vec![0usize; c.k() + 1];
    fn rec(c: &NetworkConfig, m: usize, decoder: &mut Vec<usize>, out: &mut Vec<(CellAssociation, UplinkPlan)>) {
        let k = c.k();
        if m > k {
            let pairs: Vec<(usize, usize)> = (1..=k).filter(|&i| decoder[i] != 0).map(|i| (i, decoder[i])).collect();
            let used: IndexSet = pairs.iter().map(|&(_, d)| d).collect();
            if used.len() != pairs.len() {
                return;
            }
            let assoc = CellAssociation::new(
                (1..=k)
                    .map(|i| {
                        if decoder[i] != 0 {
                            used.iter().filter(|&d| c.connected(i, d)).collect()
                        } else {
                            IndexSet::new()
                        }
                    })
                    .collect(),
            );
            if assoc.validate(c).is_err() {
                return;
            }
            if let Some(order) = find_uplink_order(c, &assoc, &pairs) {
                out.push((assoc, UplinkPlan::new(pairs, order)));
            }
            return;
        }
        for d in std::iter::once(0).chain(m.saturating_sub(c.l()).max(1)..=m) {
            decoder[m] = d;
            rec(c, m + 1, decoder, out);
        }
        decoder[m] = 0;
    }
    rec(c, 1, &mut decoder, &mut out);
    out
}

/// Every downlink plan with transmit sets of size at most `Nc`, each also
/// used as the association.
pub fn all_downlink_plans(c: &NetworkConfig) -> Vec<(CellAssociation, DownlinkPlan)> {
    let k = c.k();
    let choices: Vec<IndexSet> = std::iter::once(IndexSet::new())
        .chain((1u64..1 << k).map(IndexSet::from_mask).filter(|s| s.len() <= c.nc()))
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let sets: Vec<IndexSet> = idx.iter().map(|&i| choices[i].clone()).collect();
        let assoc = CellAssociation::new(sets.clone());
        if assoc.validate(c).is_ok() {
            let plan = DownlinkPlan::from_pairs(
                sets.into_iter().enumerate().filter(|(_, t)| !t.is_empty()).map(|(i, t)| (i + 1, t)),
            );
            out.push((assoc, plan));
        }
        let mut p = 0;
        loop {
            if p == k {
                return out;
            }
            idx[p] += 1;
            if idx[p] < choices.len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}
