//! Symmetric private information retrieval on graph-replicated storage where
//! every server holds the same common randomness.
//!
//! Messages are edges of a simple connected graph and servers are its
//! vertices. The crate builds concrete linear retrieval schemes, converts
//! PIR schemes with the symmetric retrieval property into SPIR schemes, and
//! verifies reliability, user privacy, database privacy and the capacity
//! converse inequalities exactly, using ranks over `F_q` as entropies.

pub mod algebra;
pub mod audit;
pub mod capacity;
pub mod cli;
pub mod convert;
pub mod error;
pub mod graphdb;
pub mod schemes;

pub use error::{Error, Result};
