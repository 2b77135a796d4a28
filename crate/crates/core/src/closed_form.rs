//! Closed-form per-user DoF values, in exact rational arithmetic.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact non-negative rational used for DoF accounting.
pub type Rational = Ratio<u64>;

/// Render as `p/q` in lowest terms, including integers (`3/1`).
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `p/q` (or a bare integer) into a reduced rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse().ok()?, d.trim().parse().ok()?),
        None => (s.trim().parse().ok()?, 1),
    };
    (d != 0).then(|| Ratio::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    #[error("L={l}, Nc={nc} is outside the domain {domain}")]
    Domain { l: u64, nc: u64, domain: &'static str },
    #[error("L and Nc must be at least 1 (got L={l}, Nc={nc})")]
    InvalidParameters { l: u64, nc: u64 },
    #[error("{0} is not a valid per-user DoF (must lie in [0, 1])")]
    OutOfUnitInterval(String),
}

/// Per-user degrees of freedom: an exact rational in `[0, 1]`, stored reduced.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PuDoF(Rational);

impl PuDoF {
    pub fn new(numer: u64, denom: u64) -> Result<Self, ClosedFormError> {
        if denom == 0 {
            return Err(ClosedFormError::OutOfUnitInterval(format!("{numer}/0")));
        }
        Self::from_ratio(Ratio::new(numer, denom))
    }

    pub fn from_ratio(r: Rational) -> Result<Self, ClosedFormError> {
        if r > Ratio::from_integer(1) {
            return Err(ClosedFormError::OutOfUnitInterval(fmt_rational(&r)));
        }
        Ok(Self(r))
    }

    pub fn one() -> Self {
        Self(Ratio::from_integer(1))
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// Total DoF this per-user value predicts for `k` users.
    pub fn times(&self, k: usize) -> Rational {
        self.0 * Ratio::from_integer(k as u64)
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for PuDoF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

impl fmt::Debug for PuDoF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PuDoF({})", fmt_rational(&self.0))
    }
}

impl Serialize for PuDoF {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PuDoF {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let r = parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))?;
        PuDoF::from_ratio(r).map_err(serde::de::Error::custom)
    }
}

fn check_params(l: u64, nc: u64) -> Result<(), ClosedFormError> {
    if l == 0 || nc == 0 {
        Err(ClosedFormError::InvalidParameters { l, nc })
    } else {
        Ok(())
    }
}

fn pudof(n: u64, d: u64) -> PuDoF {
    PuDoF::new(n, d).expect("closed-form value lies in [0, 1]")
}

/// Downlink zero-forcing value `2Nc / (2Nc + L)`.
pub fn pudof_downlink_zf(l: u64, nc: u64) -> Result<PuDoF, ClosedFormError> {
    check_params(l, nc)?;
    Ok(pudof(2 * nc, 2 * nc + l))
}

/// Which uplink construction a `(L, Nc)` pair falls under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UplinkRange {
    /// `Nc >= L + 1`: every user decoded, value 1.
    Full,
    /// `L/2 <= Nc <= L`: blocks of `L + 2`, value `(Nc+1)/(L+2)`.
    Blocked,
    /// `Nc <= L/2 - 1`: blocks of `2Nc + L`, value `2Nc/(2Nc+L)`.
    Split,
    /// Odd `L` with `Nc = (L-1)/2`: neither inequality holds.
    Gap,
}

impl UplinkRange {
    pub fn classify(l: u64, nc: u64) -> Self {
        if nc > l {
            UplinkRange::Full
        } else if 2 * nc >= l {
            UplinkRange::Blocked
        } else if 2 * nc + 2 <= l {
            UplinkRange::Split
        } else {
            UplinkRange::Gap
        }
    }
}

/// Uplink inner bound together with the branch it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UplinkInner {
    pub value: PuDoF,
    pub range: UplinkRange,
}

impl UplinkInner {
    pub fn is_gap(&self) -> bool {
        self.range == UplinkRange::Gap
    }
}

/// Value of the `L + 2` block construction, `(Nc+1)/(L+2)`, without domain checks.
pub(crate) fn blocked_uplink_value(l: u64, nc: u64) -> PuDoF {
    pudof(nc + 1, l + 2)
}

/// Piecewise uplink inner bound. In the uncovered gap the larger of the two
/// neighbouring construction values is returned and the result is flagged.
pub fn pudof_uplink_zf_inner(l: u64, nc: u64) -> Result<UplinkInner, ClosedFormError> {
    check_params(l, nc)?;
    let range = UplinkRange::classify(l, nc);
    let value = match range {
        UplinkRange::Full => PuDoF::one(),
        UplinkRange::Blocked => blocked_uplink_value(l, nc),
        UplinkRange::Split => pudof(2 * nc, 2 * nc + l),
        UplinkRange::Gap => blocked_uplink_value(l, nc).max(pudof(2 * nc, 2 * nc + l)),
    };
    Ok(UplinkInner { value, range })
}

/// Exact uplink zero-forcing value `(Nc+1)/(L+2)`, only on `ceil(L/2) <= Nc <= L`.
pub fn pudof_uplink_zf_exact(l: u64, nc: u64) -> Result<PuDoF, ClosedFormError> {
    check_params(l, nc)?;
    if nc < l.div_ceil(2) || nc > l {
        return Err(ClosedFormError::Domain { l, nc, domain: "ceil(L/2) <= Nc <= L" });
    }
    Ok(blocked_uplink_value(l, nc))
}

/// Downlink share of the joint scheme when `Nc >= L + 1`.
pub fn gamma_d(l: u64, nc: u64) -> Result<PuDoF, ClosedFormError> {
    check_params(l, nc)?;
    if nc < l + 1 {
        return Err(ClosedFormError::Domain { l, nc, domain: "Nc >= L + 1" });
    }
    if nc < 2 * l {
        let delta = (l + 1) % 2;
        Ok(pudof(l.div_ceil(2) + delta + nc - (l + 1), nc))
    } else {
        let reduced = nc - l;
        Ok(pudof(2 * reduced, 2 * reduced + l))
    }
}

/// Average uplink/downlink inner bound of the joint schemes.
pub fn pudof_joint_zf_inner(l: u64, nc: u64) -> Result<PuDoF, ClosedFormError> {
    check_params(l, nc)?;
    if nc > l {
        let g = gamma_d(l, nc)?;
        Ok(PuDoF((g.value() + Ratio::from_integer(1)) / Ratio::from_integer(2)))
    } else {
        pudof_downlink_zf(l, nc)
    }
}

/// Asymptotic puDoF achievable without the zero-forcing restriction in the
/// sparse uplink range. Annotation only; no scheme here achieves it.
pub const INTERFERENCE_ALIGNMENT_PUDOF: (u64, u64) = (1, 2);
