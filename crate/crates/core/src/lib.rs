//! Basis path sets for layered networks with skip connections.
//!
//! The pipeline in [`deah`] splits a network into substructures (one per
//! independent layer-level path), builds a basis for each substructure's
//! skip-free subnetwork, and removes the paths that make the union dependent.
//! The [`oracle`] module checks results by brute force.

pub mod chain;
pub mod deah;
pub mod error;
pub mod linalg;
pub mod network;
pub mod oracle;
pub mod select;
pub mod subroutine;

pub use deah::{run_deah, DeahOptions, DeahOutcome, RunStats};
pub use error::{Error, Result};
pub use network::{validate_network, Edge, NetworkSpec, NodeId, Path, RawNetwork, SubstructurePath};
pub use oracle::{certify_basis, Verdict};
