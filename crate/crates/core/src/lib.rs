//! Finite multiparty Bayesian games with classical or quantum advice.
//!
//! The crate models games in which each player receives a private input drawn
//! from a shared prior and must produce an output without communicating. A
//! common source may distribute advice (shared randomness or a shared quantum
//! state) before the inputs are known. Everything funnels through one common
//! currency: the behavior table `P(y|x)` of joint outputs given joint inputs.
//!
//! * [`game_model`] — games, behaviors, payoff evaluation, no-signalling
//!   checks, and three-party Bell functionals (correlators, the Svetlichny
//!   expression, the GHZ winning probability).
//! * [`classical`] — pure/mixed/correlated strategies, exhaustive pure-Nash
//!   enumeration, correlated-equilibrium checking, and the classical social
//!   optimum.
//! * [`quantum`] — state vectors, binary qubit measurements, Born-rule
//!   behaviors, and a seesaw optimizer for payoff-maximizing strategies.
//! * [`equilibrium`] — single-player best responses over POVM deviations and
//!   the outcome-correlation upper bound.
//! * [`npa`] — a moment-matrix relaxation that bounds a deviator's payoff by
//!   semidefinite programming, with an in-repo dense interior-point solver.
//! * [`catalog`] — the built-in games with exact rational payoff tables.
//!
//! All classical-path computation uses exact rational arithmetic; quantum-path
//! behaviors are double precision. Every type is an immutable value after
//! construction and every operation is a pure function.

// Index-heavy numeric loops over small fixed-size tables read better with
// explicit indices here.
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod classical;
pub mod equilibrium;
pub mod game_model;
pub mod linalg;
pub mod npa;
pub mod quantum;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
