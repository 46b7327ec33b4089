//! Exact calculus of ℝ-linear connections on Lie algebroids: curvature,
//! covariant differentials, Chern character and Chern–Simons forms,
//! secondary classes and Chevalley–Eilenberg cohomology.

pub mod algebroid;
pub mod arith;
pub mod bundle;
pub mod chern;
pub mod cohomology;
pub mod connection;
pub mod error;
pub mod fixture;
pub mod fixtures;
pub mod forms;
pub mod random;
pub mod suite;

pub use error::{AcsError, Result};
