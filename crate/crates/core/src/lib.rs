//! Exact simulation and analysis of coordination mechanisms for unrelated
//! machine scheduling.
//!
//! Each of n selfish players owns a job with a machine-dependent positive
//! rational processing time and picks one of m machines to minimize her own
//! completion time. A mechanism of degree d >= 2, given by a coefficient
//! function over integer multisets summing to d+1, fixes the per-machine
//! scheduling policy and thereby the induced game. This crate provides:
//!
//! - exact instances, assignments, loads, and norms ([`instance`]);
//! - coefficient functions and Lambda-function evaluation, with both a
//!   brute-force enumeration oracle and closed-form fast paths
//!   ([`mechanism`]);
//! - the potential function and exact best-response dynamics ([`dynamics`]);
//! - exhaustive equilibrium enumeration, optimal makespan, price of
//!   anarchy/stability reports, and certified load-bound checks
//!   ([`analysis`]);
//! - seeded randomized invariant suites backing the `verify` CLI command
//!   ([`verify`]).
//!
//! All game decisions are made in exact rational arithmetic; real numbers
//! appear only in rendered output. With the `parallel` feature (default),
//! enumeration-style scans fan out over a rayon pool; without it the same
//! code runs sequentially.

pub mod analysis;
pub mod dynamics;
mod error;
mod exec;
pub mod instance;
pub mod io;
pub mod mechanism;
pub mod numeric;
pub mod verify;

pub use error::Error;
pub use instance::{
    generate_instance, Assignment, GeneratorKind, GeneratorParams, Instance, LoadVector, Weight,
};
pub use mechanism::{CoefficientFunction, CompletionTime, LambdaValue, Mechanism};
pub use numeric::Rat;
