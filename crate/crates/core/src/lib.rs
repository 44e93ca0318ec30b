//! Nonasymptotic error bounds for MCMC estimators built on regeneration.
//!
//! `bounds` evaluates the drift/minorization bounds and confidence plans,
//! `regen` simulates split chains and estimates the same constants
//! empirically, and `models` holds the reference chains.

pub mod bounds;
pub mod error;
pub mod models;
pub mod numerics;
pub mod regen;
pub mod tables;

pub use error::{Error, Result};
