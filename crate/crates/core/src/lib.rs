//! Exact and asymptotic survival probabilities for a square well enclosed by a
//! square barrier with an inverse-square tail `β(β+1)/r²` beyond the barrier.
//!
//! Units are `ħ = 2m = 1` throughout, so `E = k²`.

pub mod analysis;
pub mod error;
pub mod exec;
pub mod io;
pub mod model;
pub mod oracle;
mod quad;
pub mod spectral;
pub mod specfun;
pub mod survival;

pub use error::{Error, Result};
pub use exec::Exec;
