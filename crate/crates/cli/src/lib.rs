//! Configuration parsing and output serialization for the `rydeit` binary,
//! exposed as a library so integration tests can drive the same code paths.

// `!(x > 0)`-style guards double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
