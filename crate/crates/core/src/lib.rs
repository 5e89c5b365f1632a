//! Metaheuristic-tuned QAOA on number-partitioning QUBOs.
//!
//! The crate is organised bottom-up:
//!
//! * [`qubo`] builds number-partitioning instances, their QUBO expansion and
//!   exact oracles (brute force and subset-sum dynamic programming).
//! * [`statevector`] is a dense simulator for the RZ / RZZ / RX gate set.
//! * [`qaoa`] assembles the p-layer ansatz, the expectation objective and
//!   the best-of-samples readout.
//! * [`optim`] holds the black-box minimizers: differential evolution, a
//!   binary genetic algorithm, particle swarm, ant colony and a Nelder–Mead
//!   baseline.
//! * [`anneal`] is the simulated-annealing comparison point.
//! * [`bench`] runs the seeded experiment matrix and writes CSV and SVG.
//!
//! Population evaluations, annealing reads and benchmark cells run on rayon
//! when the `parallel` feature (on by default) is enabled. Every random draw
//! happens on a single seeded stream before work is dispatched, so results
//! are bit-identical with and without the feature.

pub mod anneal;
pub mod bench;
mod error;
pub mod optim;
pub mod parallel;
pub mod qaoa;
pub mod qubo;
pub mod seed;
pub mod statevector;

pub use error::{Error, Result};
