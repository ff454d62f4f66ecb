//! Extended Kalman filter smoothing for noisy time series, aimed at
//! eye-gaze traces.
//!
//! The filter ([`ekf`]) runs over a stochastic state-space model
//! ([`statespace`]) and skips the measurement update where samples are
//! missing, so blinks become prediction-only steps. A trailing moving
//! average ([`baselines`]) serves as the comparison filter and
//! [`metrics`] scores both. [`experiment`] wires everything into the
//! synthetic and gaze experiments exposed by the `gazekf` binary.

pub mod baselines;
pub mod ekf;
pub mod error;
pub mod experiment;
pub mod gazeio;
pub mod metrics;
pub mod numfmt;
pub mod statespace;
pub mod sweep;
pub mod synthgen;

pub use error::{Error, Result};
