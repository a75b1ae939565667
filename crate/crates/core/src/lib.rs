//! Orthogonal polynomials on finite point sets.
//!
//! The crate builds orthogonal systems for positive weights on a finite grid,
//! the dual system attached to the weight `v = 1 / (u · π²)`, the discrete
//! orthogonal polynomial ensembles and their correlation kernels, and the
//! classical Krawtchouk and Hahn families. Every identity relating these
//! objects has a verification routine that checks it against an independent
//! computation, exactly on the rational backend.

pub mod classical;
pub mod duality;
pub mod ensembles;
pub mod error;
pub mod grid;
pub mod hypernum;
pub mod io;
pub mod matrix;
pub mod orthopoly;
pub mod report;

pub use error::{Error, Result};
