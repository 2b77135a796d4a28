use num_rational::Ratio;

use crate::closed_form::{pudof_downlink_zf, pudof_joint_zf_inner, pudof_uplink_zf_inner, PuDoF, Rational};
use crate::model::{Mode, NetworkConfig};
use crate::schemes::{build_scheme, evaluate};

use super::{oracle_eta, OracleError, OracleOptions, OracleResult};

/// Scheme, oracle and closed-form values side by side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub scheme_eta: Rational,
    pub oracle_eta: Rational,
    /// Closed-form puDoF times K.
    pub formula_eta: Rational,
    /// `oracle - scheme`; negative would mean the search missed a scheme plan.
    pub gap: Ratio<i64>,
    pub oracle: OracleResult,
}

pub fn formula_pudof(l: usize, nc: usize, mode: Mode) -> PuDoF {
    let (l, nc) = (l as u64, nc as u64);
    match mode {
        Mode::Down => pudof_downlink_zf(l, nc),
        Mode::Up => pudof_uplink_zf_inner(l, nc).map(|v| v.value),
        Mode::Joint => pudof_joint_zf_inner(l, nc),
    }
    .expect("L, Nc >= 1")
}

pub fn scheme_gap_report(cfg: &NetworkConfig, mode: Mode, opts: &OracleOptions) -> Result<GapReport, OracleError> {
    let oracle = oracle_eta(cfg, mode, opts)?;
    let scheme = build_scheme(cfg, mode).expect("schemes are valid for every configuration");
    let scheme_eta = evaluate(cfg, &scheme).expect("schemes pass their own checks").eta;
    let formula_eta = formula_pudof(cfg.l(), cfg.nc(), mode).times(cfg.k());
    let signed = |r: Rational| Ratio::new(*r.numer() as i64, *r.denom() as i64);
    let gap = signed(oracle.eta) - signed(scheme_eta);
    Ok(GapReport { scheme_eta, oracle_eta: oracle.eta, formula_eta, gap, oracle })
}
