//! Quantum speed limit times for two-qubit states carried through
//! correlated dephasing, amplitude-damping and squeezed generalized
//! amplitude-damping channels.
//!
//! The crate is organised as a pipeline: [`states`] builds the initial
//! state, [`channels`] turns a [`channels::ChannelSpec`] into time-indexed
//! superoperators, and [`qsl`] time-averages the speed integrands into a
//! [`qsl::QslResult`]. [`oracle`] holds independent reference solvers that
//! the pipeline never calls.

pub mod channels;
mod dual;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod qsl;
pub mod states;
pub mod sweep;
pub mod validate;

pub use error::{QslError, Result};
