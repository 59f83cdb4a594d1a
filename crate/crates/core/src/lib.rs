//! Dynamical systems on hypernetworks.
//!
//! A hypernetwork has typed vertices and typed hyperedges, each hyperedge
//! carrying an ordered list of sources and a single target. This crate
//! validates such structures, finds balanced partitions (the robust
//! synchrony patterns), builds fibrations and quotients, evaluates
//! admissible vector fields, constructs explicit polynomial witnesses of
//! synchrony breaking, and integrates the resulting ODEs.

pub mod admissible;
pub mod augment;
pub mod fibration;
pub mod format;
pub mod gallery;
pub mod generate;
pub mod model;
pub mod partition;
pub mod perm;
pub mod poly;
pub mod sim;
pub mod synchrony;

pub use admissible::{AdmissibleSystem, InputSchema, ResponseFunction, ResponseLibrary, Slot};
pub use augment::{augment, AugmentationSpec};
pub use fibration::{check_fibration, quotient, FibrationMap};
pub use format::{parse, serialize};
pub use model::{Hyperedge, Hypernetwork, Vertex};
pub use partition::{is_balanced, Partition, Signature};
pub use perm::Perm;
pub use poly::{Monomial, Polynomial, Rational};
pub use sim::{BifurcationDiagram, SimConfig};
pub use synchrony::{find_breaking_witness, robust_verdict, RobustnessVerdict};
