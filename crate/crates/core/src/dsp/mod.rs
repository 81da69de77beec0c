//! Preprocessing: power-line band-stop filtering, channel standardisation and
//! segmentation into overlapping windows.
//!
//! Order of operations in the pipeline: filter the whole recording, cut the
//! central interval, standardise with training statistics, then window.

pub mod filter;
pub mod segment;
pub mod standardize;

pub use filter::{design_bandstop, design_highpass, design_lowpass, Biquad, BiquadCascade, FilterKind};
pub use segment::{central_segment, central_start, samples_for, slide_windows, window_starts};
pub use standardize::ChannelStats;

use crate::model::Recording;

/// Filters every channel of a recording.
pub fn filter_recording(recording: &Recording, cascade: &BiquadCascade) -> Recording {
    Recording {
        samples: cascade.apply_matrix(&recording.samples),
        ..recording.clone()
    }
}
