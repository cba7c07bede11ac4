//! Equal-weight quadrature on weighted graphs.
//!
//! A symmetric kernel `G` is built so that a chosen probability measure `ν*`
//! is its equilibrium measure. Greedy minimizers of the accumulated potential
//! (Leja points) then give equal-weight quadrature rules for `∫ f dν*`.

pub mod error;
pub mod graph;
pub mod harness;
pub mod kernel;
pub mod leja;

pub use error::{Error, Result};
