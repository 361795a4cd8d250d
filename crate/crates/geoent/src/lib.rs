//! Geometric entanglement of multipartite pure quantum states.
//!
//! The distance from a normalized entangled state to the closest
//! *unnormalized* product state is a measure of its entanglement: at every
//! stationary point of the distance functional the squared norm of the
//! product state equals `cos^2` of the angle between the two states, so the
//! measure is `sin^2(theta_C) = 1 - prod N_X`. This crate provides
//!
//! - [`qstate`]: dense state tensors, product states, overlaps, the distance
//!   functional, and the line-oriented state file codec;
//! - [`linalg`]: complex Hermitian Jacobi eigendecomposition and SVD;
//! - [`closest`]: the alternating fixed-point solver for the stationarity
//!   system, with seeded multi-restart and full diagnostics;
//! - [`schmidt`]: reduced density matrices, Schmidt decompositions, the
//!   single-qubit-split quadratic, and the sequential Schmidt chain;
//! - [`symmetric`]: the exactly solved GHZ-weighted, W, ring-pair and Dicke
//!   families with their closed forms and large-q asymptotics;
//! - [`rng`]: the seeded xoshiro256++ generator behind every restart.
//!
//! All types are immutable after construction and safe to share across
//! threads.

pub mod closest;
pub mod linalg;
pub mod qstate;
pub mod rng;
pub mod schmidt;
pub mod symmetric;

pub use closest::{find_extrema, ExtremaReport, ExtremumResult, SolverConfig};
pub use qstate::{FactorShape, ProductState, PureState};
pub use schmidt::{BipartiteSplit, SchmidtChain, SchmidtDecomposition};
pub use symmetric::{FamilyKind, SymmetricFamily};
