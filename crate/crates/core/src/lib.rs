//! Full-duplex access point with spatially random half-duplex users:
//! Monte Carlo simulation and analytic evaluation of uplink/downlink rates.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod linkmetrics;
pub mod montecarlo;
pub mod precoding;
pub mod quad;
pub mod real;
pub mod specfun;

pub use error::{Error, Result};
pub use real::Real;
