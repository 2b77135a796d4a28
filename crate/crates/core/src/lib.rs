//! Zero-forcing cell association in locally connected interference networks.
//!
//! A network of `K` base station / mobile terminal pairs where terminal `i`
//! hears base stations `i-L..=i`. Each user's message may be shared with at
//! most `Nc` base stations. The crate builds association schemes for the
//! downlink, uplink and joint sessions, checks them combinatorially and
//! numerically, and searches small networks exhaustively for the optimum.

pub mod cli;
pub mod closed_form;
pub mod exec;
pub mod index_set;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod schemes;
pub mod witness;
pub mod zf_eval;

pub use closed_form::{PuDoF, Rational};
pub use exec::Exec;
pub use index_set::IndexSet;
pub use model::{CellAssociation, Mode, ModelError, NetworkConfig};
