//! Scattering on quantum graphs with internal degrees of freedom.
//!
//! Local scattering matrices are glued together with the Redheffer star
//! product ([`composer`]), whole graphs are contracted vertex by vertex
//! ([`graph`]), and a port-to-port block of the result defines an erasure
//! channel ([`channel`]) whose quantum capacity is bracketed in
//! [`capacity`]. [`physics`] builds the spin-dependent barrier model on top.

pub mod capacity;
pub mod channel;
pub mod composer;
pub mod error;
pub mod graph;
pub mod numerics;
pub mod physics;
pub mod random;
pub mod smatrix;

pub use capacity::{capacity_bounds, erasure_capacity, CapacityBounds};
pub use channel::{CptpReport, DensityMatrix, ErasureChannel};
pub use composer::{star, star_cascade, Wiring};
pub use error::{Error, Result};
pub use graph::QuantumGraph;
pub use numerics::CMatrix;
pub use physics::{BarrierParams, SpinChannelPair, SweepRow};
pub use smatrix::{Group, PortSpec, ScatteringMatrix, TransferMatrix};
