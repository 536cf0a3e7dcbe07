//! Calibration and inversion of the log-normal shadowing path-loss model.
//!
//! Fits a path-loss exponent and a distance-dependent shadowing standard
//! deviation (a quartic in distance, solved through its explicit normal
//! equations) to RSSI survey data, then inverts the calibrated model for
//! ranging, confidence intervals and coverage planning.
//!
//! ```
//! use shadowcal::estimation::{calibrate, CalibrationOptions};
//! use shadowcal::io::embedded_dataset;
//! use shadowcal::localization::estimate_distance;
//!
//! let data = embedded_dataset("gateroad-conveyor").unwrap();
//! let cal = calibrate(&data.stats, &CalibrationOptions::default()).unwrap();
//! assert!((cal.model.eta() - 1.57).abs() < 0.01);
//! let d = estimate_distance(&cal.model, -70.0).unwrap();
//! assert!(d > 5.0 && d < 10.0);
//! ```

pub mod domain;
pub mod error;
pub mod estimation;
pub mod io;
pub mod localization;
pub mod numerics;
pub mod simulation;

pub use error::{Error, Result};
