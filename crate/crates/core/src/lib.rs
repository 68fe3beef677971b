#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bcg;
pub mod error;
pub mod evaluation;
pub mod evolution;
pub mod harness;
pub mod nn;
pub mod preprocess;
pub mod rng;
pub mod sensor;

pub use error::{Error, Result};
