//! Simulation study engine for cost-aware clinical measurement scheduling.
//!
//! A two-state Markov patient simulator feeds a fixed forecasting oracle
//! that defines per-channel rewards; a factored dueling DQN learns which
//! measurement channels to order at each timepoint, and an evaluation
//! harness compares it against heuristic scheduling baselines.

pub mod baselines;
pub mod dataset;
pub mod dqn;
pub mod env;
pub mod error;
pub mod eval;
pub mod nn;
pub mod oracle;
pub mod sim;

pub use error::{Error, Result};
