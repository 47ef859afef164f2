//! Compilation-aware resource and fidelity analysis for parameterized quantum circuits.
//!
//! Circuits from the [`generators`] are routed onto a coupling graph from
//! [`topology`] by the [`compiler`], scored by the analytical model in [`noise`],
//! and swept over sizes and hardware improvement factors by [`analysis`].

pub mod analysis;
pub mod circuit;
pub mod compiler;
pub mod error;
pub mod generators;
pub mod matrix;
pub mod noise;
pub mod oracle;
pub mod report;
pub mod topology;

pub use circuit::{Circuit, Gate, GateKind};
pub use compiler::{compile, CompiledCircuit, Device, ResourceMetrics, SabreConfig};
pub use error::{Error, Result};
pub use generators::{AngleSource, CircuitFamily, EntanglementStrategy};
pub use noise::{estimate_fidelity, NoiseParams};
pub use topology::{CouplingGraph, TopologyKind};
