//! Dimension, Castelnuovo–Mumford regularity, multiplicity and reduction
//! number of toric rings of three-dimensional Ferrers diagrams.
//!
//! The [`engine`] computes the invariants by a shedding recursion over the
//! first layer. The [`oracle`] module recomputes them by brute force, and
//! [`closed_forms`] collects the known formulas and bounds.
//!
//! Counting is generic over [`Count`]; the aliases at the crate root fix
//! arbitrary-precision integers.

pub mod cli;
pub mod closed_forms;
pub mod diagram;
pub mod engine;
pub mod error;
pub mod minors;
pub mod num;
pub mod oracle;

pub use num_bigint::BigUint;

pub use closed_forms::{Partition, Reg2d};
pub use diagram::{essential_reduce, Diagram, Flavor, Plane, Point};
pub use engine::{EngineConfig, Source, SuffixState};
pub use error::{Error, Result};
pub use minors::{PairGraph, PointClass};
pub use num::Count;

/// Engine counting with arbitrary-precision integers.
pub type Engine = engine::Engine<BigUint>;
pub type InvariantsReport = engine::InvariantsReport<BigUint>;
pub type StateInvariants = engine::StateInvariants<BigUint>;
pub type SegreFactor = closed_forms::SegreFactor<BigUint>;
pub type ProfileBounds = closed_forms::ProfileBounds<BigUint>;
