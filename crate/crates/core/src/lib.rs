//! Secrecy rate regions of discrete memoryless wiretap broadcast channels:
//! probability kernel, channel orderings, region evaluators, the BEC/BSC
//! closed form and a finite-blocklength random-coding simulator.

pub mod becbsc;
pub mod error;
pub mod ordering;
pub mod probcore;
pub mod regions;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
