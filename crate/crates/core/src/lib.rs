//! Memory-load tradeoffs for cache-aided fog radio access networks.
//!
//! A macro base station (MBS) holds a library of `N` files and broadcasts on a
//! downlink to `K_mbs` cache-less users and to `H` small-cell base stations
//! (SBSs). Each SBS has a cache of `M` files, serves `L_h` users over a free
//! local link, and may broadcast to the other SBSs on a sidelink. The crate
//! computes the outer bound on the achievable `(R_mbs, R_sbs)` pairs, the
//! achievable points of the symmetric and partition-based schemes, explicit
//! delivery plans, and a GF(256) simulator that checks every plan bit by bit.

pub mod agnostic;
pub mod codec;
pub mod converse;
pub mod delivery;
pub mod envelope;
pub mod error;
pub mod figures;
pub mod gf256;
pub mod oracle;
pub mod partition;
pub mod rational;
pub mod region;
pub mod scheme;
pub mod scheme_asym;
pub mod scheme_sym;
pub mod topology;

pub use error::{Error, Result};
pub use rational::{binom, q, Rational};
pub use topology::{DemandVector, MemoryLoadPoint, Topology};
