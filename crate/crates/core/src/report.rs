//! Parameter sweeps and their CSV rendering.

use std::io::Write;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_rational::Ratio;

use crate::closed_form::{fmt_rational, PuDoF, Rational};
use crate::exec::Exec;
use crate::model::{Mode, NetworkConfig};
use crate::oracle::{formula_pudof, oracle_eta, Guard, OracleError, OracleOptions};
use crate::schemes::{build_scheme, evaluate, SchemeError};

pub const CSV_HEADER: [&str; 12] = [
    "mode",
    "K",
    "L",
    "Nc",
    "scheme_eta_dl",
    "scheme_eta_ul",
    "scheme_pudof",
    "formula_pudof",
    "oracle_eta",
    "gap",
    "decode_depth",
    "elapsed_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub k: RangeInclusive<usize>,
    pub l: RangeInclusive<usize>,
    pub nc: RangeInclusive<usize>,
    pub modes: Vec<Mode>,
    pub oracle: bool,
    /// Recorded for reproducibility; every column is deterministic.
    pub seed: u64,
    pub guard: Guard,
    pub exec: Exec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            k: 1..=12,
            l: 1..=3,
            nc: 1..=3,
            modes: Mode::ALL.to_vec(),
            oracle: false,
            seed: 0,
            guard: Guard::default(),
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub mode: Mode,
    pub k: usize,
    pub l: usize,
    pub nc: usize,
    pub scheme_eta_dl: Option<usize>,
    pub scheme_eta_ul: Option<usize>,
    pub scheme_pudof: PuDoF,
    pub formula_pudof: PuDoF,
    pub oracle_eta: Option<Rational>,
    pub gap: Option<Ratio<i64>>,
    pub decode_depth: Option<usize>,
    pub elapsed_ms: u128,
}

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.mode.to_string(),
            self.k.to_string(),
            self.l.to_string(),
            self.nc.to_string(),
            opt(self.scheme_eta_dl),
            opt(self.scheme_eta_ul),
            fmt_rational(&self.scheme_pudof.value()),
            fmt_rational(&self.formula_pudof.value()),
            self.oracle_eta.as_ref().map(fmt_rational).unwrap_or_default(),
            self.gap.map(|g| format!("{}/{}", g.numer(), g.denom())).unwrap_or_default(),
            opt(self.decode_depth),
            self.elapsed_ms.to_string(),
        ]
    }

    fn sort_key(&self) -> (&'static str, usize, usize, usize) {
        (self.mode.as_str(), self.l, self.nc, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Human-readable notes about skipped oracle cells.
    pub notices: Vec<String>,
}

/// Evaluate every grid point. Rows come back sorted by `(mode, L, Nc, K)`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput, SchemeError> {
    let mut points = Vec::new();
    for &mode in &spec.modes {
        for l in spec.l.clone() {
            for nc in spec.nc.clone() {
                for k in spec.k.clone() {
                    points.push((mode, k, l, nc));
                }
            }
        }
    }
    let opts = OracleOptions { guard: spec.guard, exec: Exec::Sequential, widen_helpers: false };
    let results = spec.exec.map(points, |(mode, k, l, nc)| sweep_point(mode, k, l, nc, spec.oracle, &opts));
    let mut rows = Vec::with_capacity(results.len());
    let mut notices = Vec::new();
    for r in results {
        let (row, notice) = r?;
        rows.push(row);
        notices.extend(notice);
    }
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(SweepOutput { rows, notices })
}

fn sweep_point(
    mode: Mode,
    k: usize,
    l: usize,
    nc: usize,
    with_oracle: bool,
    opts: &OracleOptions,
) -> Result<(SweepRow, Option<String>), SchemeError> {
    let start = Instant::now();
    let cfg = NetworkConfig::new(k, l, nc)?;
    let scheme = build_scheme(&cfg, mode)?;
    let eval = evaluate(&cfg, &scheme)?;
    let mut notice = None;
    let (oracle_eta, gap) = if with_oracle {
        match oracle_eta(&cfg, mode, opts) {
            Ok(r) => {
                let signed = |x: Rational| Ratio::new(*x.numer() as i64, *x.denom() as i64);
                (Some(r.eta), Some(signed(r.eta) - signed(eval.eta)))
            }
            Err(e @ (OracleError::Guard { .. } | OracleError::NodeLimit { .. })) => {
                notice = Some(format!("{mode} {cfg}: oracle skipped: {e}"));
                (None, None)
            }
        }
    } else {
        (None, None)
    };
    let row = SweepRow {
        mode,
        k,
        l,
        nc,
        scheme_eta_dl: eval.eta_downlink(),
        scheme_eta_ul: eval.eta_uplink(),
        scheme_pudof: eval.pudof,
        formula_pudof: formula_pudof(l, nc, mode),
        oracle_eta,
        gap,
        decode_depth: eval.decode_depth(),
        elapsed_ms: start.elapsed().as_millis(),
    };
    Ok((row, notice))
}

/// Write the header and rows. `mask_elapsed` writes `0` for timings so output is reproducible.
pub fn write_csv<W: Write>(out: W, rows: &[SweepRow], mask_elapsed: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let mut rec = row.record();
        if mask_elapsed {
            rec[11] = "0".into();
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Parse `a`, `a..b` or `a..=b` (both inclusive) or `a-b`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let s = s.trim();
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad range bound {x:?}: {e}"));
    let (lo, hi) =
        if let Some((a, b)) = s.split_once("..=").or_else(|| s.split_once("..")).or_else(|| s.split_once('-')) {
            (num(a)?, num(b)?)
        } else {
            let v = num(s)?;
            (v, v)
        };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}
