//! Enumerate *all* optimal or constraint-satisfying solutions of a
//! combinatorial problem by repeatedly drawing from a sampler that favors
//! low-cost solutions.
//!
//! The crate is built around two stopping rules for sampling-based
//! enumeration. Both extend the coupon collector's problem: sampling stops
//! once the count of accepted draws reaches the deadline
//! `ceil(m * ln(m * kappa / epsilon))` without an m-th distinct solution
//! having appeared. Under a fair sampler the probability of returning an
//! incomplete solution set is below the user-chosen tolerance `epsilon`.
//!
//! Module map:
//! - [`bounds`]: the correction factors kappa1/kappa2 and deadline arithmetic.
//! - [`enumeration`]: the two enumeration loops over an abstract [`enumeration::Sampler`].
//! - [`ising`]: Ising/QUBO energy models, an exact ground-state oracle, and
//!   a seeded single-spin-flip simulated annealer.
//! - [`maxclique`]: maximum-clique instances, their QUBO encoding, an exact
//!   reference enumerator, and the annealing-backed clique sampler.
//! - [`stats`]: fairness tests, success-rate inference, and Monte Carlo
//!   verification of the tail bounds.
//! - [`harness`]: experiment orchestration, DIMACS ingestion, and JSONL
//!   record persistence behind the `enumis` command line tool.

pub mod bounds;
pub mod enumeration;
pub mod harness;
pub mod ising;
pub mod maxclique;
pub mod model_io;
pub mod samplers;
pub mod seeding;
pub mod stats;

pub use enumeration::{EnumerationResult, Sampler, Solution, SolutionKey, StopReason};
