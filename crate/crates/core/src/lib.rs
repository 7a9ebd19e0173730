//! Matching markets with couples: stability, coalition enforceability, direct and
//! indirect dominance, farsighted stable sets and DEM farsighted stable sets.
//!
//! Every verdict comes with a certificate that can be replayed against the
//! definitions: a coalition-move path when one matching indirectly dominates
//! another, a blocking coalition when it does not.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports, and the
//! command-line front end live in the `farsight` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bits;
pub mod blocking;
pub mod diag;
pub mod dominance;
pub mod enumeration;
pub mod market;
pub mod matching;
pub mod stable_sets;

pub use blocking::{BlockMode, BlockWitness};
pub use diag::{Diagnostic, Severity, Span};
pub use dominance::{DominancePath, DominanceVerdict, Policy};
pub use enumeration::MatchingCode;
pub use market::{CoupleId, HospitalId, Market, MarketBuilder, Member, Slot, SlotPair, StudentId};
pub use matching::{Agent, Coalition, Matching};
pub use stable_sets::{StableSetReport, Verdict};
