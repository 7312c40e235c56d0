//! Transceiver design for a wireless-powered cooperative NOMA relay.
//!
//! A multi-antenna source `S` serves a near user `R` and a far user `D`.
//! `R` splits its received power between decoding and energy harvesting,
//! decodes both messages with SIC, and forwards `D`'s message in a second
//! phase using only harvested energy. The crate maximizes `R`'s rate under a
//! rate floor for `D`:
//!
//! * [`optimal_tx`] solves the transmit side exactly through its Lagrange dual,
//! * [`zf_tx`] solves the cheaper zero-forcing variant,
//! * [`rx_filter`] computes the optimal receive filter at `R` in closed form,
//! * [`alternating`] iterates the two until `R`'s rate stops improving,
//! * [`harness`] runs Monte Carlo rate-region and outage sweeps,
//! * [`oracle`] and [`verify`] brute-force the same problems as a cross-check.

pub mod alternating;
pub mod error;
pub mod feasibility;
pub mod harness;
pub mod model;
pub mod numerics;
pub mod optimal_tx;
pub mod oracle;
pub mod rates;
pub mod rx_filter;
pub mod verify;
pub mod zf_tx;

pub use error::{Result, SolveError};
pub use model::{ChannelRealization, PathLossSpec, SystemParams};
pub use rates::TxSolution;
