//! Command-line front end for the discrete Bernoulli solvers.

pub mod commands;
pub mod config;
