//! Two-person skeleton interaction recognition: per-person graph-convolutional
//! encoding, adaptive active-joint selection from temporally weighted feature
//! amplitudes, cross-person attention over the selected joints, and a
//! threshold-regularized training objective. Everything runs in f64 on CPU so
//! gradients can be checked against finite differences.

pub mod atnac;
pub mod attention;
pub mod autodiff;
pub mod cli;
pub mod data;
pub mod error;
pub mod gcn;
pub mod gradcheck;
pub mod graph;
pub mod model;
pub mod nn;
pub mod temporal;
pub mod tensor;
pub mod train;

pub use error::{AseaError, Result};
