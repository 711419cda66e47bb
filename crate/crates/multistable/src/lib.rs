//! Simulation and verification toolkit for multistable random measures:
//! stable laws whose index α varies over the domain, the variable-exponent
//! function spaces their integrands live in, dyadic-mesh simulation of the
//! measures and of processes driven by them, and statistical checks that
//! compare simulated laws against their characteristic functions.

pub mod error;
pub mod function_spaces;
pub mod multistable_core;
pub mod processes;
pub mod verify;
pub mod quad;
pub mod stable_rng;

pub use error::{Error, Result};
