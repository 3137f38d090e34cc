//! Amplitude damping induced on spin-1/2 modes by a 1+1 Robertson-Walker
//! expansion, and the classical/quantum/entanglement rate regions of the
//! resulting channel.

pub mod error;
pub mod specfun;
pub mod cosmology;
pub mod channel;
pub mod oracle;
pub mod regions;
pub mod appendix;
pub mod validate;
pub mod cli;

pub use error::{Error, Result};
