//! Gossip averaging protocols on simulated networks, built as special cases
//! of randomized sketch-and-project solvers.

// `!(x > 0.0)` style checks are kept so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gossip;
pub mod graph;
pub mod privacy;

pub use error::{GossipError, Result};
pub use gossip::{simulate, Gossip, GossipProtocol, GossipState, NodeSampling};
pub use graph::Network;
