//! Simulation of ℓ-dimensional subspace evolution under time-dependent
//! Hamiltonians, with exact separation of the evolution operator into a
//! holonomy operator and a dynamic operator.
//!
//! The crate propagates the Schrödinger equation for a frame of states on a
//! uniform time grid, builds the evolution operator Û(t), the holonomy
//! operator Γ̂(t), and the dynamic operator D̂(t), and checks the separation
//! identity Û = Γ̂·D̂ at every node. For cyclic evolution it also computes
//! the matrix forms U(T) = Γ(T)·D(T) through an independent gauge-frame
//! route and decides whether an evolution is purely holonomic.
//!
//! Start with the runnable examples (`cargo run --example separate_precession`)
//! or the `holonomy` binary, which drives scenario files end to end.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod presets;
pub mod propagation;
pub mod report;
pub mod scenario;

pub use error::{HolonomyError, Result};
