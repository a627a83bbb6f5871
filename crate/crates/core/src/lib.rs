//! Berk-Nash equilibrium: equilibrium computation and learning dynamics for games whose
//! players hold possibly misspecified parametric models.

pub mod error;
pub mod game;
pub mod numerics;
pub mod bundles;
pub mod equilibrium;
pub mod subjective;
pub mod learning;
pub mod dynamics;
pub mod format;
pub mod document;
pub mod manifest;
pub mod cli;

pub use error::{Error, Result};
