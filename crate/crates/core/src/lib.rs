//! Ordered Hilbert spaces, absolute pairings and domination of semigroups
//! generated by forms on finite weighted graphs and vector bundles.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod domination;
pub mod error;
pub mod forms;
pub mod graph;
pub mod json;
pub mod linalg;
pub mod ordered;
pub mod pairing;
pub mod sampling;
pub mod space;
pub mod vector;

pub use error::{Error, Result};
