//! Sum-frequency generation driven by broadband squeezed vacuum under
//! spectral phase control: coherent, moment-based and stochastic engines,
//! a pulse shaper, slow reference oracles and a config-driven lab runner.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod engine;
pub mod error;
pub mod fields;
pub mod lab;
pub mod lineshape;
pub mod oracles;
pub mod rng;
pub mod shaper;
pub mod spectral;

pub use error::{Error, Result};
