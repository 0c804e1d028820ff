//! Simulator for a qubit repeatedly colliding with a chain of thermal
//! environment qubits, in two variants: a direct model where the system hits
//! every ancilla itself, and an indirect one where an intermediate memory
//! qubit does the colliding. Tracks the trace distance of an evolving state
//! pair, accumulates its positive increments into an information-backflow
//! measure, and sweeps parameter grids deterministically in parallel.
//!
//! Modules
//! - [`qstate`]: dense density-matrix substrate (tensor, embed, partial trace,
//!   Hermitian eigensolves).
//! - [`gates`]: partial-swap unitaries and thermal/pure initial states.
//! - [`model`]: the two iterative collision engines plus a full-chain oracle.
//! - [`measure`]: trace distance, coherence, backflow accumulator, threshold
//!   and revival detectors.
//! - [`sweep`]: config parsing, grid evaluation, CSV export.

pub mod error;
pub mod gates;
pub mod measure;
pub mod model;
pub mod qstate;
pub mod sweep;

pub use error::{Error, Result};
