//! Equilibria of finite-alphabet privacy signaling games.
//!
//! A sender observes a measurement `Z` of a variable `X` together with a
//! private variable `W`, and reports a message `Y` to a receiver who
//! estimates `X`. The receiver pays the expected distortion `E{d(X, X̂)}`;
//! the sender pays the same distortion plus `ρ·I(Y; W)`. The game admits
//! the potential `Ψ = E{d} + ρ·I(Y; W)`, which drives the best-response
//! dynamics implemented here.
//!
//! Information quantities are in nats unless a [`prob::LogBase`] says otherwise.

pub mod dynamics;
pub mod error;
pub mod game;
pub mod harness;
pub mod multi;
pub mod presets;
pub mod prob;
pub mod solver;

pub use error::{Error, Result};
pub use game::{DistortionMatrix, GameInstance, ReceiverPolicy, SenderPolicy};
pub use prob::{FiniteSpace, JointPXZW, LogBase, Pmf2};
pub use solver::SolverSettings;
