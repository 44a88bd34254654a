//! Wavelet recurrent neural network toolkit for solar irradiance forecasting.
//!
//! Meteorological series are decomposed with filter-bank or lifting
//! wavelets, timescale-selected coefficient bands feed a masked
//! Williams–Zipser recurrent network trained by real-time recurrent
//! learning, and forecasts are scored by relative RMS and correlation.

pub mod exec;
pub mod filters;
pub mod kv;
pub mod lifting;
pub mod metrics;
pub mod rnn;
pub mod timeseries;
pub mod wrnn;

pub use exec::Execution;
