//! Core library for computing cooperative equilibria of finite games in
//! explicit form.
//!
//! A game in explicit form couples a classical normal-form game (players,
//! finite strategy sets, gain functions measured in an abstract good) with
//! behavioural data: an altruism function and per-player fairness functions.
//! On top of that model this crate implements:
//!
//! * coalition-structure enumeration and coalition (merged) games,
//! * Nash and acceptable (disagreement-minimizing) equilibria of the merged
//!   games,
//! * deviation incentives, risks and prior deviation probabilities, and the
//!   resulting coalition-structure values under expected utility and under
//!   cumulative prospect theory,
//! * altruism-driven iterated deletion of super-dominated strategies,
//! * the end-to-end cooperative-equilibrium solver.
//!
//! The crate is `no_std`-compatible (it requires `alloc`); all exact
//! arithmetic uses arbitrary-precision rationals and floating point is
//! confined to the prospect-theory transforms.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod cpt;
pub mod deletion;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod generators;
pub mod partition;
pub mod solver;
pub mod valuation;

pub use cpt::{CptParams, Prospect};
pub use error::CoopError;
pub use game::{Altruism, ExplicitGame, Fairness, MixedProfile, MixedStrategy, Rational};
pub use partition::CoalitionStructure;
pub use solver::CooperativeSolution;
