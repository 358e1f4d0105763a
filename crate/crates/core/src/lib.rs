//! Coherence of multipartite bosonic GHZ and W states observed from
//! uniformly accelerated frames.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: sparse real Fock-basis states, density operators, partial trace.
//! - [`rindler`]: the Unruh substitution of a Minkowski qubit mode by a pair of
//!   Rindler modes, with a controlled truncation of the infinite expansions.
//! - [`states`]: GHZ/W initial states and the full scenario pipeline down to
//!   region-I density operators.
//! - [`coherence`]: brute-force l1-norm coherence, the closed-form series
//!   expressions and their infinite-acceleration limits.
//! - [`analysis`]: subsystem coherence maps, GHZ globality and W distribution
//!   checks, monotonicity sweeps.
//! - [`cli`]: configuration-driven sweeps, figure-data export and the
//!   command-line front end used by the `unruh-coherence` binary.

pub mod analysis;
pub mod cli;
pub mod coherence;
mod error;
pub mod fock;
pub mod rindler;
pub mod states;

pub use error::{Error, Result};
