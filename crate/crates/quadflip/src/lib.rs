//! Edge flips on rooted quadrangulations, leaf moves on coloured plane trees,
//! the Schaeffer bijection between labelled trees and pointed quadrangulations,
//! and the canonical path machinery comparing the associated Markov chains.
//!
//! Start with [`trees::ColouredTree`] and [`maps::Quadrangulation`]; the
//! examples directory walks through every module.

pub mod canonical_paths;
pub mod chains;
pub mod cli;
pub mod error;
pub mod flip_paths;
pub mod maps;
pub mod schaeffer;
pub mod spectral;
pub mod trees;

pub use error::{Error, Result};
