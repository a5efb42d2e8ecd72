//! Probit publication-selection models for sparse-event meta-analysis.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod estimation;
pub mod models;
pub mod optimize;
pub mod quadrature;
pub mod selection;
pub mod sensitivity;
pub mod simulation;
pub mod special;

pub use error::{MetaError, Result};
