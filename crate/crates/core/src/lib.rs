//! Robust subspace prototypes on Grassmann manifolds.
//!
//! Points are linear subspaces of a common ambient space `R^n`, possibly of
//! different dimensions. The crate provides their geometry (principal
//! angles, chordal and geodesic distances, exponential and logarithm maps),
//! three prototype solvers (flag mean, flag median by FlagIRLS, ℓ2-median by
//! a Riemannian Weiszfeld iteration) plus a gradient-descent baseline, LBG
//! clustering with any of them, and experiment tooling: seeded synthetic
//! generators, test-point verification of local minima, outlier robustness
//! tables and classical MDS.

// Negated float comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod linalg;
pub mod prototypes;
pub mod rng;
pub mod synth;

pub use dataset::{Provenance, SubspaceDataset};
pub use error::{Error, Result};
pub use grassmann::{
    chordal_distance, exp_map, geodesic_distance, log_map, principal_angles, PrincipalAngles,
    Subspace,
};
pub use prototypes::{FlagPrototype, Init, Method, SolverConfig, SolverResult, Termination};
