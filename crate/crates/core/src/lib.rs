// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constitutive;
pub mod energy;
pub mod error;
pub mod fracture;
pub mod numerics;
pub mod selfsim;
pub mod slic;

pub use error::{Error, Result};
