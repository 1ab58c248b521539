//! Numerical and exact tools for modular forms of second order.

pub mod autoseries;
pub mod crossing;
pub mod dims;
pub mod error;
pub mod eval;
pub mod group;
pub mod numerics;
pub mod operators;
pub mod qseries;
pub mod report;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
