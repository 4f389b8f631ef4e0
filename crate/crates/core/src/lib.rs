//! Finite ontological models and mechanical checks of ψ-ontology results.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: small-dimension complex linear algebra, pure states, POVMs,
//!   Born probabilities and the quantum distinguishability / overlap measures.
//! - [`omodel`]: finite ontological models, their metrics (statistical
//!   distance, classical overlap, in-model distinguishability), reproduction
//!   checks, classification and Bayesian preparation inference.
//! - [`lpopt`]: a dense simplex solver with certificates and the fragment
//!   fitting / overlap-maximizing LPs built on it.
//! - [`antidist`]: antidistinguishability certificates, the explicit
//!   two-qubit measurement for the `|0>,|+>` product quadruple, a numerical
//!   POVM search and the exact triple criterion.
//! - [`bclm`]: mutually unbiased bases in dimension four, the 16-state family
//!   and the average-overlap audit.
//! - [`pucthm`]: preparation-independence and preparation-uninformativeness
//!   checkers and the theorem verifiers built on them.
//! - [`io`] and [`cli`]: JSON schemas, fixtures and the command-line driver.

#![forbid(unsafe_code)]

pub mod antidist;
pub mod bclm;
pub mod cli;
pub mod error;
pub mod io;
pub mod lpopt;
pub mod omodel;
pub mod pucthm;
pub mod qcore;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
