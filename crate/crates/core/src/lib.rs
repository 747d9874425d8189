//! Mild solutions of impulsive semilinear differential inclusions with
//! infinite fading-memory delay, and finite-sample optimization over their
//! solution sets.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod inclusion;
pub mod optimizer;
pub mod phase_space;
pub mod population;
pub mod profile;
pub mod solver;
pub mod space;
pub mod table;

pub use error::{Error, Result};
pub use space::StateSpace;
