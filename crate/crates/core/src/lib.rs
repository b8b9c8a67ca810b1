//! Latent space models for hypergraphs with non-simplicial random geometric
//! structure: generative sampling, Bayesian inference, asymptotic theory and
//! posterior predictive checks.

pub mod baselines;
pub mod error;
pub mod genmodel;
pub mod geometry;
pub mod hypercore;
pub mod inference;
pub mod linalg;
pub mod par;
pub mod predictive;
pub mod rng;
pub mod shape;
pub mod theory;

pub use error::{Error, Result};
