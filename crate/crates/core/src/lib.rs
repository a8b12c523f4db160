//! Thermostatics of ideal quantum gases written in terms of the
//! complexities of intrinsic data lists, with computable stand-ins for
//! Kolmogorov complexity and a small event-driven gas simulator.
//!
//! Module map:
//!
//! * [`physcore`] constants and species records (SI throughout)
//! * [`combinatorics`] exact and asymptotic log-binomials, net disorder
//! * [`thermostatics`] state equations, Legendre transforms, occupancies
//! * [`wall_regime`] length hierarchy, Lennard-Jones, Langmuir wall models
//! * [`randomness`] encoded lists, complexity estimators, deficiency tests
//! * [`gas_sim`] collisionless gas in a box with randomising walls
//! * [`par`] execution policy shared by all batch entry points

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod error;
pub mod gas_sim;
pub mod par;
pub mod physcore;
pub mod randomness;
pub mod stats;
pub mod thermostatics;
pub mod wall_regime;

pub use error::{QkmError, Result};
pub use par::Exec;
