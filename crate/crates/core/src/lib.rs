//! Electrode-shift robustness benchmark for HD-sEMG gesture recognition:
//! synthetic and canonical-format data, band-stop filtering, channel-subset
//! augmentation, classical feature sets, PCA + LDA, and the statistics used to
//! compare training conditions.

pub mod dsp;
pub mod error;
pub mod experiments;
pub mod features;
pub mod ingest;
pub mod learn;
pub mod model;
pub mod shift;
pub mod stats;

pub use error::{Error, Result};
