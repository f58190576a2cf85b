//! Finite-alphabet tunable leakage measures.
//!
//! This crate is `no_std` (it needs `alloc`) and contains the numeric
//! substrate only: validated probability objects ([`prob`]), closed-form
//! Rényi / Arimoto / Sibson quantities ([`measures`]) and maximal
//! α-leakage as a support-constrained capacity problem ([`capacity`]).
//! File formats, randomized experiments and the command-line front end live
//! in the companion `alphaleak` crate.
//!
//! All quantities are computed in nats internally and converted to the
//! requested [`LogBase`] at the boundary.
//!
//! ```
//! use alphaleak_core::{AlphaOrder, Channel, LogBase, Pmf};
//! use alphaleak_core::measures::sibson_mi;
//!
//! let px = Pmf::uniform(&["0", "1"]).unwrap();
//! let bsc = Channel::binary_symmetric(0.25).unwrap();
//! let v = sibson_mi(&px, &bsc, AlphaOrder::new(2.0).unwrap(), LogBase::Bits).unwrap();
//! assert!((v.value - 0.321928).abs() < 1e-6);
//! ```

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod capacity;
mod error;
pub(crate) mod math;
pub mod measures;
pub mod prob;

pub use capacity::{CapacityResult, CondCapacityResult, Method, SolverOptions};
pub use error::{Error, Result};
pub use measures::MeasureValue;
pub use prob::{AlphaOrder, Axis, Channel, Joint2, Joint3, LogBase, Marginal, Pmf};
