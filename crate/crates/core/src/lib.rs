//! Evolutionary dynamics of the optional public goods game in which
//! non-participants earn an outside payoff `alpha` and hand a payoff `beta`
//! to every participant.
//!
//! * [`game`]: closed-form and enumerated expected payoffs.
//! * [`svo`]: social value orientation of non-participants.
//! * [`dynamics`]: replicator-mutator field, integration, the `beta = 0`
//!   Hamiltonian and long-run classification.
//! * [`equilibria`]: stationary points, stability and edge invasion analysis.
//! * [`sweep`]: `(alpha, beta)` phase diagrams.

pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod format;
pub mod game;
pub mod sweep;
pub mod svo;

pub use error::{Error, Result};
pub use game::{
    brute_force_payoffs, mean_payoffs, payoff_gap, population_mean, GameParams, PayoffTriple,
    SimplexState,
};
pub use svo::{classify_svo, SvoClass, SvoLabel};
