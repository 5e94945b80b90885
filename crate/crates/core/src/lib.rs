//! `minlab` is a desk-scale laboratory for causal-structure learning over
//! categorical variables.
//!
//! The crate is organized bottom-up:
//!
//! - [`graphs`]: DAGs, conditional-independence statements, d-separation,
//!   entailment sets and Markov-equivalence classes.
//! - [`distributions`]: exact joint tables, CPT networks, exact CI checks,
//!   total variation distance and perturbations.
//! - [`states`]: faithful / minimal / u-minimal / quasi-faithful predicates and
//!   the named fixture library.
//! - [`sampling`]: seeded IID draws and empirical tables.
//! - [`citest`]: the L1 distance-from-independence test and the super-test.
//! - [`learner`]: hypothesis orders, the selector and the learning method built
//!   from them.
//! - [`experiments`]: Monte-Carlo harnesses and report emission.

pub mod citest;
pub mod distributions;
mod error;
pub mod experiments;
pub mod graphs;
pub mod learner;
pub mod sampling;
pub mod states;

pub use error::{Error, Result};
