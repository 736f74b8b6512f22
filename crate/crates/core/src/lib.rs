//! Inference of categorical outcomes from categorical attributes.
//!
//! The pipeline runs univariate chi-square screening, forward selection of a
//! baseline-category logit model by deviance tests, a fixed-order
//! classification tree with its flattened rule set, and confusion-matrix
//! based evaluation. A small HTTP service and a CLI sit on top.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod logit;
pub mod service;
pub mod stats;
pub mod stepwise;
pub mod synth;
pub mod tree;

pub use error::{Error, Result};
