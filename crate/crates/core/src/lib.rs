//! List-decoding capacity bounds and symmetrizability for arbitrarily varying
//! channels under an average state-cost constraint.

// `!(a < b)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod channel_file;
pub mod cli;
pub mod dist;
pub mod error;
pub mod example;
pub mod info;
pub mod jointapprox;
pub mod linprog;
pub mod simulate;
pub mod symmetry;
pub mod types;

pub use dist::{Avc, Channel, ConditionalChannel, Dist, JointDistribution};
pub use error::{Error, Result};
