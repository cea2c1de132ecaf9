//! A laboratory for studying a weight-shared Transformer encoder as a
//! discrete-time dynamical system `x_{t+1} = f(x_t)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`encoder`]: the shared encoder layer `f`, its initialisation and iteration.
//! - [`embedding`]: vocabulary, tokenisation and the embedding map `x_0 = u(s)`.
//! - [`dynamics`]: trajectory diagnostics (token deviation, synchronisation offset,
//!   local Lyapunov exponents, effective dimension, transient-chaos length, PCA).
//! - [`readout`]: linear and softmax readouts trained on trajectories.
//! - [`container`]: the `TDLAB001` named-tensor file used to import weights.
//! - [`harness`]: config-driven experiment orchestration and reports.
//!
//! Runnable walkthroughs for each capability live in the crate's `examples/`
//! directory.

pub mod container;
pub mod dynamics;
pub mod embedding;
pub mod encoder;
mod error;
pub mod harness;
pub mod readout;
pub mod rng;

pub use error::{Error, Result};
