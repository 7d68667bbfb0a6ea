//! Entropy in general probabilistic theories.
//!
//! States of classical, quantum and box-world systems share one operational
//! layer ([`framework`]); entropic quantities over all three live in
//! [`entropy`]. Box-world probabilities are exact rationals throughout.

pub mod boxworld;
pub mod classical;
pub mod coding;
pub mod entropy;
pub mod error;
pub mod framework;
pub mod games;
pub mod golden;
pub mod info;
pub mod io;
pub mod linalg;
pub mod quantum;
pub mod rational;

pub use error::{Error, Result};
