//! Rainfall-onset detection from ground-based sky-camera imagery.
//!
//! The pipeline compares the measured luminance of a whole-sky image against
//! a modeled clear-sky luminance and flags precipitation when their ratio
//! (the clearness luminance index) drops below a critical threshold:
//!
//! 1. [`solar`] — solar geometry and the clear-sky global horizontal
//!    irradiance (GHI) model for the imager site.
//! 2. [`luminance`] — measured luminance from cropped sky images, and the
//!    irradiance-to-luminance calibration that yields clear-sky luminance.
//! 3. [`index`] — the clearness luminance index `I = L_m / L_c` and the
//!    threshold detection rule.
//! 4. [`calibration`] — threshold calibration: rain-event construction from
//!    gauge logs, ±window labeling, per-class CDFs, the operating
//!    characteristics sweep, and elbow selection.
//! 5. [`ingest`] — image-directory and gauge-CSV loading, time alignment,
//!    and the dataset manifest.
//! 6. [`synth`] — synthetic scenario generation with planted rain events,
//!    for desk-scale verification of the full pipeline.

pub mod calibration;
pub mod error;
pub mod fsio;
pub mod index;
pub mod ingest;
pub mod luminance;
pub mod solar;
pub mod synth;

pub use error::{Error, Result};
