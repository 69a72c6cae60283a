//! npequiv — exact checking of strong behavioral equivalences on
//! nondeterministic and probabilistic labeled transition systems (NPLTS).
//!
//! The crate models finite NPLTS with exact rational probabilities, enumerates
//! the resolutions of nondeterminism induced by deterministic schedulers,
//! computes decorated-trace event probabilities inside resolutions, and decides
//! the full spectrum of trace-, simulation-, bisimulation- and testing-based
//! equivalences in their three definitional schemas (fully matching,
//! partially matching, and extremal "sup/inf" matching), plus the
//! combined-transition (randomized-scheduler) variants that admit exact
//! decision procedures.

pub mod dsl;
pub mod events;
pub mod lp;
pub mod model;
pub mod rat;
pub mod resolution;
pub mod sim_equiv;
pub mod spectrum;
pub mod testing;
pub mod trace_equiv;

pub use model::{Nplts, StateId};
pub use rat::Rat;
